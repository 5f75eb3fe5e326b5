#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "punn/error.hpp"
#include "punn/metrics.hpp"

using namespace punn;

namespace {

std::vector<OutputVector> to_vec(const oracle::Matrix& m) { return {m.begin(), m.end()}; }

oracle::Matrix random_matrix(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  oracle::Matrix m(n);
  for (auto& row : m)
    for (auto& v : row) v = u(rng);
  return m;
}

double sum4(const OutputVector& v) { return v[0] + v[1] + v[2] + v[3]; }

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("mse worked values") {
    const std::vector<OutputVector> t{{2, 0, 0, 0}}, p{{0, 0, 0, 0}};
    const auto m = mse(p, t);
    CHECK(m.per_output == OutputVector{4, 0, 0, 0});
    CHECK(m.global == 4.0);

    const std::vector<OutputVector> t2{{1, 0, 0, 0}, {3, 0, 0, 0}}, p2{{0, 0, 0, 0}, {0, 0, 0, 0}};
    CHECK(mse(p2, t2).per_output[0] == 5.0);
    CHECK(mse(t2, t2).global == 0.0);
  }

  TEST_CASE("sep worked values") {
    const std::vector<OutputVector> t{{11, 1, 1, 1}}, p{{10, 1, 1, 1}};
    const auto s = sep(p, t, {10, 1, 1, 1});
    CHECK(s.per_output[0] == doctest::Approx(10.0));
    CHECK(s.per_output[1] == 0.0);
    CHECK(sep(t, t, {10, 1, 1, 1}).global == 0.0);
  }

  TEST_CASE("evaluate uses the evaluated set's target means") {
    const std::vector<OutputVector> t{{8, 1, 1, 1}, {12, 1, 1, 1}}, p{{9, 1, 1, 1}, {11, 1, 1, 1}};
    const auto r = evaluate(p, t);
    CHECK(r.n == 2);
    CHECK(r.mse[0] == 1.0);
    CHECK(r.sep[0] == doctest::Approx(10.0));
    CHECK(r.global_mse == sum4(r.mse));
    CHECK(r.global_sep == sum4(r.sep));
  }

  TEST_CASE("argument errors") {
    const std::vector<OutputVector> one{{1, 1, 1, 1}}, two{{1, 1, 1, 1}, {1, 1, 1, 1}}, none;
    CHECK_THROWS_AS(mse(one, two), ArgumentError);
    CHECK_THROWS_AS(mse(none, none), ArgumentError);
    const std::vector<OutputVector> bad{{std::nan(""), 1, 1, 1}};
    CHECK_THROWS_AS(mse(bad, one), ValidationError);
    CHECK_THROWS_AS(sep(one, one, {0, 1, 1, 1}), ArgumentError);
    CHECK_THROWS_AS(sep(one, two, {1, 1, 1, 1}), ArgumentError);
  }

  TEST_CASE("oracle equivalence on random instances (property)") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + trial % 20;
      const auto t = random_matrix(rng, n, -50, 100);
      const auto p = random_matrix(rng, n, -50, 100);
      std::array<double, 4> means{};
      for (auto& m : means) m = std::uniform_real_distribution<double>(0.5, 80)(rng);
      const auto got_mse = mse(to_vec(p), to_vec(t));
      const auto got_sep = sep(to_vec(p), to_vec(t), means);
      const auto want_mse = oracle::naive_mse(p, t);
      const auto want_sep = oracle::naive_sep(p, t, means);
      for (int k = 0; k < 4; ++k) {
        CHECK(oracle::relative_error(got_mse.per_output[k], want_mse[k]) <= 1e-12);
        CHECK(oracle::relative_error(got_sep.per_output[k], want_sep[k]) <= 1e-12);
      }
      CHECK(got_mse.global == sum4(got_mse.per_output));
      CHECK(got_sep.global == sum4(got_sep.per_output));
    }
  }

  TEST_CASE("sep is scale invariant and mse permutation invariant (property)") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 2 + trial % 15;
      const auto t = random_matrix(rng, n, 1, 10);
      const auto p = random_matrix(rng, n, 1, 10);
      const OutputVector means{5, 6, 7, 8};
      const double c = std::ldexp(1.0, trial % 9 - 4);  // powers of two scale exactly
      auto ts = t, ps = p;
      for (auto& row : ts)
        for (auto& v : row) v *= c;
      for (auto& row : ps)
        for (auto& v : row) v *= c;
      OutputVector ms = means;
      for (auto& v : ms) v *= c;
      CHECK(sep(to_vec(ps), to_vec(ts), ms).per_output == sep(to_vec(p), to_vec(t), means).per_output);

      auto tp = t, pp = p;
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t i = 0; i < n; ++i) {
        tp[i] = t[order[i]];
        pp[i] = p[order[i]];
      }
      const auto a = mse(to_vec(p), to_vec(t)), b = mse(to_vec(pp), to_vec(tp));
      for (int k = 0; k < 4; ++k) CHECK(a.per_output[k] == doctest::Approx(b.per_output[k]).epsilon(1e-14));
    }
  }

  TEST_CASE("global column is the sum of the per-output columns in the published layout") {
    // Mean row of the published PUNN results: the global entries are sums of the
    // rounded per-output entries up to rounding in the last digit.
    MetricRow row{"Mean", {3.06, 41.13, 1.83e-4, 1.26e-1}, 0.0, {1.51, 4.41, 4.76, 3.12}, 0.0, 38.80};
    row.global_mse = sum4(row.mse);
    row.global_sep = sum4(row.sep);
    CHECK(std::fabs(row.global_mse - 44.32) < 0.005);
    CHECK(std::fabs(row.global_sep - 13.79) < 0.015);
    const std::array<MetricRow, 1> rows{row};
    const auto table = render_metric_table("Test", rows);
    CHECK(table.find("Global") != std::string::npos);
    CHECK(table.find("LAEQ") != std::string::npos);
    CHECK(table.find("#Links") != std::string::npos);
    CHECK(table.find("44.32") != std::string::npos);
    CHECK(table.find("38.8") != std::string::npos);
  }

  TEST_CASE("to_row copies a report") {
    MetricReport r;
    r.mse = {1, 2, 3, 4};
    r.global_mse = 10;
    r.sep = {5, 6, 7, 8};
    r.global_sep = 26;
    const auto row = to_row("x", r, 18.0);
    CHECK(row.global_mse == 10);
    CHECK(row.sep[3] == 8);
    CHECK(row.links == 18.0);
  }
}
