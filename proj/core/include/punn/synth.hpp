#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "punn/dataset.hpp"
#include "punn/netmodel.hpp"
#include "punn/normalization.hpp"

/// Experimental-design grid and synthetic labeled data for desk-scale experiments.
///
/// The feature vectors produced here are not PWM physics: each harmonic is the
/// catalogued share of its fundamental times a seeded jitter. They exist to give
/// the training code a controllable ground truth.
namespace punn::synth {

enum class Technique { Slpwm, HipwmFmtc, HipwmFmtc2 };

std::string_view to_string(Technique t) noexcept;

struct SlopeControl {
  double k;
  friend bool operator==(const SlopeControl&, const SlopeControl&) = default;
};
struct CarrierControl {
  double k_c;
  double f_c;
  friend bool operator==(const CarrierControl&, const CarrierControl&) = default;
};
struct AngleControl {
  int alpha_deg;
  friend bool operator==(const AngleControl&, const AngleControl&) = default;
};

using Control = std::variant<SlopeControl, CarrierControl, AngleControl>;

struct DesignPoint {
  Technique technique;
  int modulation_index;  // M
  int poles;             // p
  Control control;
  friend bool operator==(const DesignPoint&, const DesignPoint&) = default;
};

inline constexpr std::array<int, 9> kModulationIndices{5, 7, 9, 11, 13, 15, 17, 19, 21};
inline constexpr std::array<int, 4> kPoleCounts{2, 4, 6, 12};
inline constexpr int kAlphaMinDeg = 17;
inline constexpr int kAlphaMaxDeg = 45;

/// The eleven SLPWM k values used for modulation index M.
const std::array<double, 11>& slpwm_k_values(int modulation_index);

/// HIPWM-FMTC (k_c, f_c) pairs for modulation index M. Both parameters step
/// from their minimum by their increment, the maximum is always included, and
/// the two sequences are taken pairwise.
std::vector<std::pair<double, double>> fmtc_pairs(int modulation_index);

/// Catalogued HIPWM-FMTC test count for modulation index M.
int fmtc_test_count(int modulation_index);

/// Every design point, ordered by technique, M, control value, then p.
std::vector<DesignPoint> enumerate_design();

/// Percent of the 50 Hz fundamental for each voltage input X6..X21 and each current input X23..X40.
const std::array<double, 16>& voltage_harmonic_percent();
const std::array<double, 18>& current_harmonic_percent();

/// Nominal fundamental voltage for modulation index M (before jitter).
double nominal_fundamental_voltage(int modulation_index);

/// share-of-fundamental * fundamental * jitter.
constexpr double harmonic_amplitude(double fundamental, double percent, double jitter) noexcept {
  return percent / 100.0 * fundamental * jitter;
}

inline constexpr double kHarmonicJitterLo = 0.5;
inline constexpr double kHarmonicJitterHi = 1.5;
inline constexpr double kFundamentalJitter = 0.05;

/// Deterministic 40-input vector for a design point, clamped to the working ranges.
InputVector synth_features(const DesignPoint& point, std::uint64_t seed);

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr double kDefaultNoiseFraction = 0.02;

struct SynthConfig {
  /// Seeds the feature jitter, the noise stream and the optional subsampling.
  std::uint64_t seed = kDefaultSeed;
  /// Noise SD per output as a fraction of that output's noiseless label range.
  double noise_fraction = kDefaultNoiseFraction;
  /// Explicit noise SDs in native units; overrides noise_fraction when set.
  std::optional<OutputVector> noise_sd;
  /// Labels come from this model; the reference PUNN when empty.
  std::optional<NetworkModel> label_model;
  /// Keep a seeded random subset of this many design points (0 keeps all).
  std::size_t max_patterns = 0;
};

/// Labeled dataset: one pattern per (possibly subsampled) design point.
Dataset generate(const SynthConfig& config);

/// Native output ranges the reference model's normalized outputs are mapped onto.
const std::array<Range, kNumOutputs>& reference_output_ranges();

/// Normalization attached to reference_punn() by default: inputs min-max fitted
/// on the default-seed design features, outputs mapped from the range of the
/// reference predictions over that design onto reference_output_ranges().
const NormalizationSpec& reference_normalization();

}  // namespace punn::synth
