#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "punn/analysis.hpp"
#include "punn/error.hpp"
#include "punn/synth.hpp"

using namespace punn;

namespace {

const Dataset& design_data() {
  static const Dataset d = synth::generate({});
  return d;
}

InputVector random_interior(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  InputVector z{};
  for (auto& v : z) v = u(rng);
  return z;
}

NetworkModel sigmoid_model() {
  HiddenNode a, b;
  a.set_weight(x(3), -1.5);
  a.set_weight(x(7), 2.0);
  a.bias = 0.3;
  a.output_coeffs = {1.0, -0.5, 0.25, 2.0};
  b.set_weight(x(7), 0.75);
  b.set_weight(x(30), -3.0);
  b.bias = -0.2;
  b.output_coeffs = {-1.0, 0.5, 1.5, 0.1};
  return NetworkModel(BasisKind::SigmoidUnit, {a, b}, {0.1, 0.2, 0.3, 0.4}, reference_punn().normalization());
}

Surface grid_surface(std::vector<double> cells) {
  Surface s{x(3), x(5), {1.0}, {}, {}, {}};
  for (std::size_t i = 0; i < cells.size(); ++i) s.axis_b.push_back(static_cast<double>(i));
  for (auto& g : s.outputs) g = cells;
  return s;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("reference model slope signs") {
    const auto ref = reference_punn();
    const auto r = influence(ref, ref.normalization().normalize_inputs(design_data().input_means()));
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      CHECK(r.signs[k][x(3)] == Sign::Negative);
      CHECK(r.signs[k][x(5)] == Sign::Negative);
      CHECK(r.signs[k][x(26)] == Sign::Positive);
      CHECK(r.signs[k][x(15)] == Sign::Positive);
      CHECK(r.slopes[k][x(1)] == 0.0);
      CHECK(r.signs[k][x(1)] == Sign::Zero);
      std::size_t nonzero = 0;
      for (double s : r.slopes[k]) nonzero += s != 0.0;
      CHECK(nonzero == 10);
    }
    CHECK(sign_symbol(Sign::Negative) == '-');
    CHECK(sign_symbol(Sign::Zero) == '0');
  }

  TEST_CASE("single product node slope formula") {
    const auto ref = reference_punn();
    InputVector z{};
    z.fill(0.8);
    const auto r = influence(ref, z);
    const double b = eval_basis(ref.hidden()[0], BasisKind::ProductUnit, z);
    for (std::size_t k = 0; k < kNumOutputs; ++k)
      for (const auto& [i, w] : ref.hidden()[0].weights)
        CHECK(r.slopes[k][i] == doctest::Approx(ref.output_coeff(k, 0) * w * b / z[i]).epsilon(1e-14));
  }

  TEST_CASE("analytic slopes agree with central differences (property)") {
    std::mt19937_64 rng(31);
    for (const auto& model : {reference_punn(), sigmoid_model()}) {
      for (int point = 0; point < 20; ++point) {
        const auto z = random_interior(rng);
        const auto r = influence(model, z);
        for (std::size_t k = 0; k < kNumOutputs; ++k)
          for (std::size_t i = 0; i < kNumInputs; ++i) {
            const double fd = oracle::central_difference(
                [&](const InputVector& v) { return predict_normalized(model, v)[k]; }, z, i);
            if (std::fabs(r.slopes[k][i]) > 1e-8) {
              CHECK(oracle::relative_error(r.slopes[k][i], fd) <= 1e-4);
            } else {
              CHECK(std::fabs(fd) <= 1e-6);
            }
          }
      }
    }
  }

  TEST_CASE("influence propagates domain errors") {
    InputVector z{};
    z.fill(0.5);
    z[x(3)] = 0.0;
    CHECK_THROWS_AS(influence(reference_punn(), z), DomainError);
  }

  TEST_CASE("influence table export") {
    const auto ref = reference_punn();
    InputVector z{};
    z.fill(0.5);
    const auto text = format_influence(influence(ref, z));
    std::istringstream in(text);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      ++lines;
      CHECK(std::count(line.begin(), line.end(), ',') == 40);
    }
    CHECK(lines == 9);
    CHECK(text.find("LAEQ_sign") != std::string::npos);
  }

  TEST_CASE("fixed point policies") {
    const auto& d = design_data();
    const auto m = FixedPoint::means(d);
    const auto md = FixedPoint::medians(d);
    CHECK(m.values == d.input_means());
    CHECK(md.values == d.input_medians());
    CHECK(md.values[x(3)] == 5.0);  // median of {2,4,6,12} repeated evenly
    InputVector v{};
    v.fill(1.0);
    CHECK(FixedPoint::explicit_values(v).values == v);
    CHECK_THROWS_AS(FixedPoint::means(Dataset{}), ValidationError);
  }

  TEST_CASE("one-cell surface equals a single prediction") {
    const auto ref = reference_punn();
    const auto fixed = FixedPoint::means(design_data());
    const auto s = surface(ref, x(3), x(5), {1, {4.0, 4.0}}, {1, {100.0, 100.0}}, fixed);
    auto xv = fixed.values;
    xv[x(3)] = 4.0;
    xv[x(5)] = 100.0;
    const auto y = predict(ref, xv);
    for (std::size_t k = 0; k < kNumOutputs; ++k) CHECK(s.at(k, 0, 0) == y[k]);
  }

  TEST_CASE("swapping the swept variables transposes the grids") {
    const auto ref = reference_punn();
    const auto fixed = FixedPoint::means(design_data());
    const AxisSpec a{5, default_axis_range(ref, x(3))}, b{7, default_axis_range(ref, x(26))};
    const auto s1 = surface(ref, x(3), x(26), a, b, fixed);
    const auto s2 = surface(ref, x(26), x(3), b, a, fixed);
    for (std::size_t k = 0; k < kNumOutputs; ++k)
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 7; ++j) CHECK(s1.at(k, i, j) == s2.at(k, j, i));
    CHECK(s1.outputs[0].size() == 35);
  }

  TEST_CASE("reference surfaces over p and V50 decrease along both axes") {
    const auto ref = reference_punn();
    const auto fixed = FixedPoint::means(design_data());
    const AxisSpec a{20, default_axis_range(ref, x(3))}, b{20, default_axis_range(ref, x(5))};
    const auto s = surface(ref, x(3), x(5), a, b, fixed);
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j) {
          if (i + 1 < 20) CHECK(s.at(k, i + 1, j) <= s.at(k, i, j));
          if (j + 1 < 20) CHECK(s.at(k, i, j + 1) <= s.at(k, i, j));
        }
      const auto& g = s.outputs[k];
      CHECK(std::max_element(g.begin(), g.end()) - g.begin() == 0);
    }
  }

  TEST_CASE("surface argument checks name the variable") {
    const auto ref = reference_punn();
    const auto fixed = FixedPoint::means(design_data());
    CHECK_THROWS_AS(surface(ref, x(3), x(3), {2, {2, 12}}, {2, {2, 12}}, fixed), ArgumentError);
    try {
      surface(ref, x(3), x(5), {2, {2, 12}}, {2, {0.0, 300.0}}, fixed);
      FAIL("expected a range error");
    } catch (const ArgumentError& e) {
      CHECK(std::string(e.what()).find("X5/V50") != std::string::npos);
    }
  }

  TEST_CASE("axes") {
    const auto ax = make_axis({5, {2.0, 12.0}});
    REQUIRE(ax.size() == 5);
    CHECK(ax.front() == 2.0);
    CHECK(ax.back() == 12.0);
    CHECK(ax[2] == doctest::Approx(7.0));
    CHECK(make_axis({1, {2.0, 12.0}}) == std::vector<double>{2.0});
    const auto r = default_axis_range(reference_punn(), x(3));
    CHECK(r.min == 2.0);
    CHECK(r.max == 12.0);
  }

  TEST_CASE("extremes worked values and permutation invariance") {
    const auto e = extremes(grid_surface({1.0, 5.0}));
    CHECK(e[0].min == 1.0);
    CHECK(e[0].span == 4.0);
    CHECK(e[0].max == 5.0);
    const auto c = extremes(grid_surface({3.5, 3.5, 3.5}));
    CHECK(c[2].min == 3.5);
    CHECK(c[2].span == 0.0);
    CHECK(c[2].max == 3.5);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> cells(1 + trial % 17);
      for (auto& v : cells) v = u(rng);
      const auto before = extremes(grid_surface(cells));
      std::shuffle(cells.begin(), cells.end(), rng);
      const auto after = extremes(grid_surface(cells));
      CHECK(before[1].min == after[1].min);
      CHECK(before[1].max == after[1].max);
      CHECK(after[1].span == after[1].max - after[1].min);
    }
  }

  TEST_CASE("surface export") {
    const auto ref = reference_punn();
    const auto s = surface(ref, x(3), x(5), {3, {2, 12}}, {4, default_axis_range(ref, x(5))}, FixedPoint::means(design_data()));
    const auto text = format_surface(s);
    CHECK(text.find("p,V50,LAEQ,L,R,SA\n") != std::string::npos);
    CHECK(text.find("non-physical") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 1 + 12);
  }
}
