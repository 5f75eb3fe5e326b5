#include <doctest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "punn/error.hpp"
#include "punn/metrics.hpp"
#include "punn/synth.hpp"

using namespace punn;
using namespace punn::synth;

namespace {

std::map<Technique, std::size_t> count_by_technique(const std::vector<DesignPoint>& pts) {
  std::map<Technique, std::size_t> c;
  for (const auto& p : pts) ++c[p.technique];
  return c;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("design counts per technique") {
    const auto pts = enumerate_design();
    CHECK(pts.size() == 3712);
    const auto c = count_by_technique(pts);
    CHECK(c.at(Technique::Slpwm) == 396);
    CHECK(c.at(Technique::HipwmFmtc) == 2272);
    CHECK(c.at(Technique::HipwmFmtc2) == 1044);
    CHECK(9 * 11 * 4 == 396);
    CHECK(29 * 9 * 4 == 1044);
  }

  TEST_CASE("carrier test counts per modulation index") {
    const std::map<int, int> published{{5, 41}, {7, 57}, {9, 61}, {11, 64}, {13, 53},
                                       {15, 61}, {17, 69}, {19, 77}, {21, 85}};
    int total = 0;
    for (auto [m, tests] : published) {
      CHECK(fmtc_test_count(m) == tests);
      CHECK(fmtc_pairs(m).size() == static_cast<std::size_t>(tests));
      total += tests;
    }
    CHECK(total == 568);
    CHECK(total * 4 == 2272);
    CHECK_THROWS_AS(fmtc_pairs(6), ArgumentError);
  }

  TEST_CASE("carrier pairs step inclusively from the minimum to the maximum") {
    for (int m : kModulationIndices) {
      const auto pairs = fmtc_pairs(m);
      REQUIRE(pairs.size() >= 2);
      CHECK(pairs.front().first == 0.0);
      CHECK(pairs.front().second == doctest::Approx(m));
      CHECK(pairs.back().first == doctest::Approx(2.0 * m));
      CHECK(pairs.back().second == doctest::Approx(2.0 * m));
      for (std::size_t i = 1; i < pairs.size(); ++i) {
        CHECK(pairs[i].first > pairs[i - 1].first);
        CHECK(pairs[i].second > pairs[i - 1].second);
      }
    }
    // M = 11: 22 / 0.35 = 62.86 steps, so 63 stepped values plus the appended maximum.
    const auto p11 = fmtc_pairs(11);
    CHECK(p11[62].first == doctest::Approx(62 * 0.35));
    CHECK(p11[63].first == 22.0);
  }

  TEST_CASE("slope and angle controls") {
    for (int m : kModulationIndices) {
      const auto& ks = slpwm_k_values(m);
      CHECK(std::set<double>(ks.begin(), ks.end()).size() == 11);
    }
    CHECK(slpwm_k_values(5).front() == -0.74);
    std::set<int> alphas;
    for (const auto& p : enumerate_design())
      if (const auto* a = std::get_if<AngleControl>(&p.control)) alphas.insert(a->alpha_deg);
    CHECK(alphas.size() == 29);
    CHECK(*alphas.begin() == 17);
    CHECK(*alphas.rbegin() == 45);
  }

  TEST_CASE("enumeration is stable") {
    CHECK(enumerate_design() == enumerate_design());
    const auto pts = enumerate_design();
    std::set<int> poles, ms;
    for (const auto& p : pts) {
      poles.insert(p.poles);
      ms.insert(p.modulation_index);
    }
    CHECK(poles == std::set<int>{2, 4, 6, 12});
    CHECK(ms.size() == 9);
  }

  TEST_CASE("harmonic amplitude follows the catalogued shares") {
    CHECK(voltage_harmonic_percent()[0] == 8.19);
    CHECK(harmonic_amplitude(200.0, voltage_harmonic_percent()[0], 1.0) == doctest::Approx(16.38));
  }

  TEST_CASE("features are deterministic, in range and structurally consistent (property)") {
    const auto pts = enumerate_design();
    const auto& ranges = working_ranges();
    for (std::size_t n = 0; n < pts.size(); n += 37) {
      const auto& pt = pts[n];
      const auto a = synth_features(pt, 5);
      CHECK(a == synth_features(pt, 5));
      CHECK(a[kPoles] == pt.poles);
      CHECK(a[kModulation] == pt.modulation_index);
      for (std::size_t i = 0; i < kNumInputs; ++i) {
        CHECK(a[i] >= ranges[i].min);
        CHECK(a[i] <= ranges[i].max);
      }
      const double v50 = a[kFirstVoltage];
      const double share = a[kFirstVoltage + 1] / v50 * 100.0;
      if (a[kFirstVoltage + 1] > ranges[kFirstVoltage + 1].min && a[kFirstVoltage + 1] < ranges[kFirstVoltage + 1].max) {
        CHECK(share >= 8.19 * kHarmonicJitterLo - 1e-9);
        CHECK(share <= 8.19 * kHarmonicJitterHi + 1e-9);
      }
      double sq = 0.0;
      for (std::size_t i = kFirstVoltage + 1; i < kFirstCurrent; ++i) sq += a[i] * a[i];
      const double thd = 100.0 * std::sqrt(sq) / v50;
      if (thd > ranges[kVthd].min && thd < ranges[kVthd].max) CHECK(a[kVthd] == doctest::Approx(thd));
    }
    CHECK(synth_features(pts[0], 1) != synth_features(pts[0], 2));
  }

  TEST_CASE("fundamental voltage increases with the modulation index") {
    double prev_max = 0.0;
    for (int m : kModulationIndices) {
      double lo = 1e9, hi = 0.0;
      for (const auto& p : enumerate_design())
        if (p.modulation_index == m) {
          const double v = synth_features(p, 3)[kFirstVoltage];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      CHECK(lo > prev_max);
      prev_max = hi;
    }
  }

  TEST_CASE("noiseless generation reproduces the labeling model exactly") {
    SynthConfig cfg;
    cfg.noise_fraction = 0.0;
    const auto d = generate(cfg);
    CHECK(d.size() == 3712);
    const auto ref = reference_punn();
    std::vector<OutputVector> preds;
    for (const auto& p : d) {
      preds.push_back(predict(ref, p.inputs));
      CHECK(preds.back() == p.outputs);
    }
    CHECK(mse(preds, d.outputs()).global == 0.0);
    const auto tt = split(d, 0.75, 1);
    CHECK(tt.train.size() == 2784);
    CHECK(tt.test.size() == 928);
    REQUIRE(d.provenance().size() >= 2);
    CHECK(d.provenance()[0].find("synthetic") != std::string::npos);
    CHECK(d.provenance()[1].find("seed=1") != std::string::npos);
  }

  TEST_CASE("user label model and subsampling") {
    const auto ref = reference_punn();
    auto node = ref.hidden()[0];
    node.output_coeffs = {0.5, 0.5, 0.5, 0.5};
    const NetworkModel other(BasisKind::ProductUnit, {node}, ref.output_bias(), ref.normalization());
    SynthConfig cfg;
    cfg.noise_fraction = 0.0;
    cfg.label_model = other;
    cfg.max_patterns = 100;
    cfg.seed = 4;
    const auto d = generate(cfg);
    CHECK(d.size() == 100);
    for (const auto& p : d) CHECK(predict(other, p.inputs) == p.outputs);
    CHECK(format_dataset(d) == format_dataset(generate(cfg)));
    cfg.seed = 5;
    CHECK(format_dataset(d) != format_dataset(generate(cfg)));
  }

  TEST_CASE("noise standard deviation matches the configuration") {
    SynthConfig clean_cfg;
    clean_cfg.noise_fraction = 0.0;
    SynthConfig noisy_cfg;
    noisy_cfg.noise_sd = OutputVector{1.0, 2.0, 0.001, 0.05};
    const auto clean = generate(clean_cfg);
    const auto noisy = generate(noisy_cfg);
    const auto m = mse(clean.outputs(), noisy.outputs());
    const OutputVector expected{1.0, 4.0, 1e-6, 0.0025};
    for (std::size_t k = 0; k < kNumOutputs; ++k)
      CHECK(m.per_output[k] == doctest::Approx(expected[k]).epsilon(0.1));
    SynthConfig bad;
    bad.noise_sd = OutputVector{-1, 0, 0, 0};
    CHECK_THROWS_AS(generate(bad), ArgumentError);
  }

  TEST_CASE("reference normalization maps design predictions onto the anchor ranges") {
    const auto d = generate(SynthConfig{.seed = 1, .noise_fraction = 0.0});
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      double lo = 1e300, hi = -1e300;
      for (const auto& p : d) {
        lo = std::min(lo, p.outputs[k]);
        hi = std::max(hi, p.outputs[k]);
      }
      CHECK(lo == doctest::Approx(reference_output_ranges()[k].min));
      CHECK(hi == doctest::Approx(reference_output_ranges()[k].max));
    }
  }
}
