#include "punn/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "punn/error.hpp"
#include "punn/rng.hpp"
#include "punn/text.hpp"

namespace punn::synth {

std::string_view to_string(Technique t) noexcept {
  switch (t) {
    case Technique::Slpwm: return "SLPWM";
    case Technique::HipwmFmtc: return "HIPWM-FMTC";
    case Technique::HipwmFmtc2: return "HIPWM-FMTC2";
  }
  return "?";
}

namespace {

std::size_t modulation_slot(int m) {
  const auto it = std::find(kModulationIndices.begin(), kModulationIndices.end(), m);
  if (it == kModulationIndices.end()) throw ArgumentError("modulation index " + std::to_string(m) + " is not in the design");
  return static_cast<std::size_t>(it - kModulationIndices.begin());
}

struct CarrierGrid {
  double kc_min, kc_max, fc_min, fc_max, dkc, dfc;
  int tests;
};

constexpr std::array<CarrierGrid, 9> kCarrierGrids{{
    {0, 10, 5, 10, 0.25, 0.125, 41},
    {0, 14, 7, 14, 0.25, 0.125, 57},
    {0, 18, 9, 18, 0.30, 0.15, 61},
    {0, 22, 11, 22, 0.35, 0.175, 64},
    {0, 26, 13, 26, 0.50, 0.25, 53},
    {0, 30, 15, 30, 0.50, 0.25, 61},
    {0, 34, 17, 34, 0.50, 0.25, 69},
    {0, 38, 19, 38, 0.50, 0.25, 77},
    {0, 42, 21, 42, 0.50, 0.25, 85},
}};

std::vector<double> inclusive_steps(double lo, double hi, double step) {
  constexpr double eps = 1e-9;
  const auto steps = static_cast<int>(std::floor((hi - lo) / step + eps));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 2);
  for (int i = 0; i <= steps; ++i) out.push_back(lo + i * step);
  if (std::abs(out.back() - hi) > eps)
    out.push_back(hi);
  else
    out.back() = hi;
  return out;
}

std::uint64_t point_key(const DesignPoint& p) {
  auto key = mix64(static_cast<std::uint64_t>(p.technique), static_cast<std::uint64_t>(p.modulation_index));
  key = mix64(key, static_cast<std::uint64_t>(p.poles));
  std::visit(
      [&key](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SlopeControl>) {
          key = mix64(key, std::bit_cast<std::uint64_t>(c.k));
        } else if constexpr (std::is_same_v<T, CarrierControl>) {
          key = mix64(mix64(key, std::bit_cast<std::uint64_t>(c.k_c)), std::bit_cast<std::uint64_t>(c.f_c));
        } else {
          key = mix64(key, static_cast<std::uint64_t>(c.alpha_deg));
        }
      },
      p.control);
  return key;
}

double clamp_to(std::size_t i, double v) {
  const auto& r = working_ranges()[i];
  return std::clamp(v, r.min, r.max);
}

}  // namespace

const std::array<double, 11>& slpwm_k_values(int modulation_index) {
  static const std::array<std::array<double, 11>, 9> table{{
      {-0.74, -0.84, -0.94, -1.04, -1.14, -1.24, -1.34, -1.44, -1.54, -1.64, -1.74},
      {1.24, 1.34, 1.44, 1.54, 1.64, 1.74, 1.84, 1.94, 2.04, 2.14, 2.24},
      {-2.74, -2.64, -2.54, -2.44, -2.34, -2.24, -2.14, -2.04, -1.94, -1.84, -1.75},
      {2.25, 2.35, 2.45, 2.55, 2.65, 2.75, 2.85, 2.95, 3.05, 3.15, 3.24},
      {-3.74, -3.64, -3.54, -3.44, -3.34, -3.24, -3.14, -3.04, -2.94, -2.84, -2.75},
      {3.25, 3.35, 3.45, 3.55, 3.65, 3.75, 3.85, 3.95, 4.05, 4.15, 4.24},
      {-4.74, -4.64, -4.54, -4.44, -4.34, -4.24, -4.14, -4.04, -3.94, -3.84, -3.75},
      {4.25, 4.35, 4.45, 4.55, 4.65, 4.75, 4.85, 4.95, 5.05, 5.15, 5.24},
      {-5.74, -5.64, -5.54, -5.44, -5.34, -5.24, -5.14, -5.04, -4.94, -4.84, -4.75},
  }};
  return table[modulation_slot(modulation_index)];
}

int fmtc_test_count(int modulation_index) { return kCarrierGrids[modulation_slot(modulation_index)].tests; }

std::vector<std::pair<double, double>> fmtc_pairs(int modulation_index) {
  const auto& g = kCarrierGrids[modulation_slot(modulation_index)];
  const auto kc = inclusive_steps(g.kc_min, g.kc_max, g.dkc);
  const auto fc = inclusive_steps(g.fc_min, g.fc_max, g.dfc);
  const auto n = std::min({kc.size(), fc.size(), static_cast<std::size_t>(g.tests)});
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(kc[i], fc[i]);
  return pairs;
}

std::vector<DesignPoint> enumerate_design() {
  std::vector<DesignPoint> points;
  points.reserve(3712);
  for (int m : kModulationIndices)
    for (double k : slpwm_k_values(m))
      for (int p : kPoleCounts) points.push_back({Technique::Slpwm, m, p, SlopeControl{k}});
  for (int m : kModulationIndices)
    for (auto [kc, fc] : fmtc_pairs(m))
      for (int p : kPoleCounts) points.push_back({Technique::HipwmFmtc, m, p, CarrierControl{kc, fc}});
  for (int m : kModulationIndices)
    for (int alpha = kAlphaMinDeg; alpha <= kAlphaMaxDeg; ++alpha)
      for (int p : kPoleCounts) points.push_back({Technique::HipwmFmtc2, m, p, AngleControl{alpha}});
  return points;
}

const std::array<double, 16>& voltage_harmonic_percent() {
  // V250 .. V2450
  static constexpr std::array<double, 16> pct{8.19, 8.05, 8.72,  11.43, 11.50, 9.83, 9.34, 11.05,
                                              10.14, 8.59, 8.02, 8.36,  7.73,  7.40, 6.77, 7.00};
  return pct;
}

const std::array<double, 18>& current_harmonic_percent() {
  // I100 .. I2450
  static constexpr std::array<double, 18> pct{2.87, 2.25, 19.35, 14.19, 10.55, 11.48, 9.04, 6.88, 5.49,
                                              5.90, 4.70, 3.68,  3.05,  2.93,  2.47,  2.17, 1.86, 1.74};
  return pct;
}

double nominal_fundamental_voltage(int modulation_index) {
  // 40 V at M = 5 rising linearly to 220 V at M = 21. With at most 5% jitter
  // the per-M bands stay disjoint, so V50 is increasing in M.
  return 40.0 + (modulation_index - 5) * (180.0 / 16.0);
}

InputVector synth_features(const DesignPoint& point, std::uint64_t seed) {
  Rng rng(mix64(seed, point_key(point)));
  InputVector x{};
  x[kPoles] = point.poles;
  x[kModulation] = point.modulation_index;

  const double v50 = nominal_fundamental_voltage(point.modulation_index) *
                     rng.uniform(1.0 - kFundamentalJitter, 1.0 + kFundamentalJitter);
  x[kFirstVoltage] = clamp_to(kFirstVoltage, v50);
  double v_sq = 0.0;
  const auto& vpct = voltage_harmonic_percent();
  for (std::size_t h = 0; h < vpct.size(); ++h) {
    const auto i = kFirstVoltage + 1 + h;
    x[i] = clamp_to(i, harmonic_amplitude(v50, vpct[h], rng.uniform(kHarmonicJitterLo, kHarmonicJitterHi)));
    v_sq += x[i] * x[i];
  }

  const double i50 = 0.06 + 0.28 * (v50 - 40.0) / 180.0 * rng.uniform(0.9, 1.1);
  x[kFirstCurrent] = clamp_to(kFirstCurrent, i50);
  double i_sq = 0.0;
  const auto& ipct = current_harmonic_percent();
  for (std::size_t h = 0; h < ipct.size(); ++h) {
    const auto i = kFirstCurrent + 1 + h;
    x[i] = clamp_to(i, harmonic_amplitude(x[kFirstCurrent], ipct[h], rng.uniform(kHarmonicJitterLo, kHarmonicJitterHi)));
    i_sq += x[i] * x[i];
  }

  x[kVthd] = clamp_to(kVthd, 100.0 * std::sqrt(v_sq) / x[kFirstVoltage]);
  x[kIthd] = clamp_to(kIthd, 100.0 * std::sqrt(i_sq) / x[kFirstCurrent]);
  return x;
}

const std::array<Range, kNumOutputs>& reference_output_ranges() {
  // LAEQ (dB), L, R, SA spans of the published (p, V50) response surfaces.
  static constexpr std::array<Range, kNumOutputs> ranges{{{55.0, 90.0}, {65.0, 110.0}, {0.141, 0.147}, {5.6, 6.4}}};
  return ranges;
}

const NormalizationSpec& reference_normalization() {
  static const NormalizationSpec spec = [] {
    const auto points = enumerate_design();
    std::vector<Pattern> rows;
    rows.reserve(points.size());
    for (const auto& p : points) rows.push_back(Pattern{synth_features(p, kDefaultSeed), {}});
    const auto inputs_only = fit_normalizer(Dataset(std::move(rows)));

    const auto probe = reference_punn(inputs_only);
    OutputVector lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& p : points) {
      const auto z = predict_normalized(probe, inputs_only.normalize_inputs(synth_features(p, kDefaultSeed)));
      for (std::size_t k = 0; k < kNumOutputs; ++k) {
        lo[k] = std::min(lo[k], z[k]);
        hi[k] = std::max(hi[k], z[k]);
      }
    }
    std::array<AffineMap, kNumOutputs> out;
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      const auto& r = reference_output_ranges()[k];
      out[k] = AffineMap{r.min, r.max, lo[k], hi[k]};
    }
    return inputs_only.with_outputs(
        out, Interval{*std::min_element(lo.begin(), lo.end()), *std::max_element(hi.begin(), hi.end())});
  }();
  return spec;
}

Dataset generate(const SynthConfig& config) {
  auto points = enumerate_design();
  if (config.max_patterns > 0 && config.max_patterns < points.size()) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 engine(mix64(config.seed, 0x5ab5e7ULL));
    std::shuffle(order.begin(), order.end(), engine);
    order.resize(config.max_patterns);
    std::sort(order.begin(), order.end());
    std::vector<DesignPoint> kept;
    kept.reserve(order.size());
    for (auto i : order) kept.push_back(points[i]);
    points = std::move(kept);
  }

  const NetworkModel& labeler = config.label_model ? *config.label_model : [] () -> const NetworkModel& {
    static const NetworkModel reference = reference_punn();
    return reference;
  }();

  std::vector<Pattern> rows;
  rows.reserve(points.size());
  for (const auto& p : points) {
    Pattern row;
    row.inputs = synth_features(p, config.seed);
    row.outputs = predict(labeler, row.inputs);
    rows.push_back(row);
  }

  OutputVector sd{};
  if (config.noise_sd) {
    sd = *config.noise_sd;
  } else if (!rows.empty()) {
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(), [k](const Pattern& a, const Pattern& b) {
        return a.outputs[k] < b.outputs[k];
      });
      sd[k] = config.noise_fraction * (hi->outputs[k] - lo->outputs[k]);
    }
  }
  for (double s : sd)
    if (!(s >= 0.0) || !std::isfinite(s)) throw ArgumentError("noise standard deviations must be finite and >= 0");

  Rng noise(mix64(config.seed, 0x401537ULL));
  for (auto& row : rows)
    for (std::size_t k = 0; k < kNumOutputs; ++k) row.outputs[k] += noise.normal(0.0, sd[k]);

  std::vector<std::string> provenance{
      "punnkit synthetic generator v1 (features: harmonic shares x seeded jitter, not measured data)",
      "seed=" + std::to_string(config.seed) + " patterns=" + std::to_string(rows.size()) +
          " labels=" + (config.label_model ? "user-model" : "reference-punn"),
      "noise_sd=" + text::format_double(sd[0]) + "," + text::format_double(sd[1]) + "," + text::format_double(sd[2]) +
          "," + text::format_double(sd[3]),
  };
  return Dataset(std::move(rows), std::move(provenance));
}

}  // namespace punn::synth
