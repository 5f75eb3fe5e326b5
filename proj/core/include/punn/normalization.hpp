#pragma once

#include <array>

#include "punn/dataset.hpp"
#include "punn/schema.hpp"

namespace punn {

struct Interval {
  double lo;
  double hi;
  constexpr double mid() const noexcept { return 0.5 * (lo + hi); }
  friend constexpr bool operator==(Interval, Interval) = default;
};

inline constexpr Interval kDefaultInputInterval{0.1, 1.1};
inline constexpr Interval kDefaultOutputInterval{0.1, 0.9};

/// Min-max map from a source interval onto a target interval. A degenerate
/// source (min == max) sends every value to the target midpoint and inverts
/// back to the source value.
struct AffineMap {
  double src_min = 0.0;
  double src_max = 1.0;
  double dst_lo = 0.0;
  double dst_hi = 1.0;

  bool degenerate() const noexcept { return src_max == src_min; }
  double apply(double v) const noexcept;
  double invert(double z) const noexcept;
  /// d(apply)/dv.
  double scale() const noexcept;

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

class NormalizationSpec {
 public:
  NormalizationSpec();
  NormalizationSpec(std::array<AffineMap, kNumInputs> inputs, std::array<AffineMap, kNumOutputs> outputs,
                    Interval input_target, Interval output_target);

  /// Maps every variable onto itself.
  static NormalizationSpec identity();

  const AffineMap& input(std::size_t i) const { return inputs_[i]; }
  const AffineMap& output(std::size_t k) const { return outputs_[k]; }
  Interval input_target() const noexcept { return input_target_; }
  Interval output_target() const noexcept { return output_target_; }

  InputVector normalize_inputs(const InputVector& x) const noexcept;
  InputVector denormalize_inputs(const InputVector& z) const noexcept;
  OutputVector normalize_outputs(const OutputVector& y) const noexcept;
  OutputVector denormalize_outputs(const OutputVector& z) const noexcept;

  NormalizationSpec with_outputs(std::array<AffineMap, kNumOutputs> outputs, Interval output_target) const;

  friend bool operator==(const NormalizationSpec&, const NormalizationSpec&) = default;

 private:
  std::array<AffineMap, kNumInputs> inputs_;
  std::array<AffineMap, kNumOutputs> outputs_;
  Interval input_target_;
  Interval output_target_;
};

/// Per-variable min-max fit on the training set. Input targets must be strictly
/// positive so product units stay defined.
NormalizationSpec fit_normalizer(const Dataset& train, Interval input_interval = kDefaultInputInterval,
                                 Interval output_interval = kDefaultOutputInterval);

/// Applies `spec` to every pattern. Throws DomainError naming the first
/// pattern/variable whose normalized input is not strictly positive.
Dataset normalize(const Dataset& data, const NormalizationSpec& spec);

}  // namespace punn
