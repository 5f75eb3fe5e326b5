#include "punn/normalization.hpp"

#include <algorithm>
#include <string>

#include "punn/error.hpp"
#include "punn/text.hpp"

namespace punn {

double AffineMap::apply(double v) const noexcept {
  if (degenerate()) return 0.5 * (dst_lo + dst_hi);
  return dst_lo + (v - src_min) * (dst_hi - dst_lo) / (src_max - src_min);
}

double AffineMap::invert(double z) const noexcept {
  if (degenerate()) return src_min;
  return src_min + (z - dst_lo) * (src_max - src_min) / (dst_hi - dst_lo);
}

double AffineMap::scale() const noexcept {
  if (degenerate()) return 0.0;
  return (dst_hi - dst_lo) / (src_max - src_min);
}

NormalizationSpec::NormalizationSpec() : NormalizationSpec(identity()) {}

NormalizationSpec::NormalizationSpec(std::array<AffineMap, kNumInputs> inputs,
                                     std::array<AffineMap, kNumOutputs> outputs, Interval input_target,
                                     Interval output_target)
    : inputs_(inputs), outputs_(outputs), input_target_(input_target), output_target_(output_target) {}

NormalizationSpec NormalizationSpec::identity() {
  std::array<AffineMap, kNumInputs> in;
  std::array<AffineMap, kNumOutputs> out;
  in.fill(AffineMap{0.0, 1.0, 0.0, 1.0});
  out.fill(AffineMap{0.0, 1.0, 0.0, 1.0});
  return NormalizationSpec(in, out, Interval{0.0, 1.0}, Interval{0.0, 1.0});
}

InputVector NormalizationSpec::normalize_inputs(const InputVector& x) const noexcept {
  InputVector z;
  for (std::size_t i = 0; i < kNumInputs; ++i) z[i] = inputs_[i].apply(x[i]);
  return z;
}

InputVector NormalizationSpec::denormalize_inputs(const InputVector& z) const noexcept {
  InputVector x;
  for (std::size_t i = 0; i < kNumInputs; ++i) x[i] = inputs_[i].invert(z[i]);
  return x;
}

OutputVector NormalizationSpec::normalize_outputs(const OutputVector& y) const noexcept {
  OutputVector z;
  for (std::size_t k = 0; k < kNumOutputs; ++k) z[k] = outputs_[k].apply(y[k]);
  return z;
}

OutputVector NormalizationSpec::denormalize_outputs(const OutputVector& z) const noexcept {
  OutputVector y;
  for (std::size_t k = 0; k < kNumOutputs; ++k) y[k] = outputs_[k].invert(z[k]);
  return y;
}

NormalizationSpec NormalizationSpec::with_outputs(std::array<AffineMap, kNumOutputs> outputs,
                                                  Interval output_target) const {
  return NormalizationSpec(inputs_, outputs, input_target_, output_target);
}

NormalizationSpec fit_normalizer(const Dataset& train, Interval input_interval, Interval output_interval) {
  if (train.empty()) throw ValidationError("cannot fit a normalizer on an empty dataset");
  if (!(input_interval.lo < input_interval.hi) || !(output_interval.lo < output_interval.hi))
    throw ArgumentError("normalization interval must satisfy lo < hi");
  if (!(input_interval.lo > 0.0))
    throw ArgumentError("input normalization interval must be strictly positive for product units, got lo = " +
                        text::format_double(input_interval.lo));

  std::array<AffineMap, kNumInputs> in;
  for (std::size_t i = 0; i < kNumInputs; ++i) {
    auto [lo, hi] = std::minmax_element(train.begin(), train.end(), [i](const Pattern& a, const Pattern& b) {
      return a.inputs[i] < b.inputs[i];
    });
    in[i] = AffineMap{lo->inputs[i], hi->inputs[i], input_interval.lo, input_interval.hi};
  }
  std::array<AffineMap, kNumOutputs> out;
  for (std::size_t k = 0; k < kNumOutputs; ++k) {
    auto [lo, hi] = std::minmax_element(train.begin(), train.end(), [k](const Pattern& a, const Pattern& b) {
      return a.outputs[k] < b.outputs[k];
    });
    out[k] = AffineMap{lo->outputs[k], hi->outputs[k], output_interval.lo, output_interval.hi};
  }
  return NormalizationSpec(in, out, input_interval, output_interval);
}

Dataset normalize(const Dataset& data, const NormalizationSpec& spec) {
  std::vector<Pattern> rows;
  rows.reserve(data.size());
  const auto& schema = FeatureSchema::standard();
  for (std::size_t r = 0; r < data.size(); ++r) {
    Pattern p{spec.normalize_inputs(data[r].inputs), spec.normalize_outputs(data[r].outputs)};
    for (std::size_t i = 0; i < kNumInputs; ++i) {
      if (!(p.inputs[i] > 0.0)) {
        throw DomainError("row " + std::to_string(r + 1) + ": normalized " + schema.describe_input(i) + " = " +
                          text::format_double(p.inputs[i]) + " is not strictly positive");
      }
    }
    rows.push_back(p);
  }
  return Dataset(std::move(rows), data.provenance(), data.has_outputs());
}

}  // namespace punn
