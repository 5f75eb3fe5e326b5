#include "punn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "punn/error.hpp"
#include "punn/text.hpp"

namespace punn {

char sign_symbol(Sign s) noexcept {
  switch (s) {
    case Sign::Negative: return '-';
    case Sign::Zero: return '0';
    case Sign::Positive: return '+';
  }
  return '?';
}

InfluenceReport influence(const NetworkModel& model, const InputVector& nominal_normalized) {
  InfluenceReport report;
  report.nominal = nominal_normalized;
  const auto& hidden = model.hidden();
  for (std::size_t j = 0; j < hidden.size(); ++j) {
    const auto& node = hidden[j];
    const double b = eval_basis(node, model.basis(), nominal_normalized, j);
    for (const auto& [i, w] : node.weights) {
      const double db = model.basis() == BasisKind::ProductUnit ? w * b / nominal_normalized[i] : w * b * (1.0 - b);
      for (std::size_t k = 0; k < kNumOutputs; ++k) report.slopes[k][i] += node.output_coeffs[k] * db;
    }
  }
  for (std::size_t k = 0; k < kNumOutputs; ++k)
    for (std::size_t i = 0; i < kNumInputs; ++i) {
      const double s = report.slopes[k][i];
      report.signs[k][i] = s > 0.0 ? Sign::Positive : (s < 0.0 ? Sign::Negative : Sign::Zero);
    }
  return report;
}

std::string format_influence(const InfluenceReport& report) {
  const auto& schema = FeatureSchema::standard();
  std::string out = "output";
  for (std::size_t i = 0; i < kNumInputs; ++i) {
    out += ',';
    out += schema.input_name(i);
  }
  out += '\n';
  for (std::size_t k = 0; k < kNumOutputs; ++k) {
    out += schema.output_name(k);
    for (std::size_t i = 0; i < kNumInputs; ++i) out += ',' + text::format_double(report.slopes[k][i]);
    out += '\n';
  }
  for (std::size_t k = 0; k < kNumOutputs; ++k) {
    out += std::string(schema.output_name(k)) + "_sign";
    for (std::size_t i = 0; i < kNumInputs; ++i) {
      out += ',';
      out += sign_symbol(report.signs[k][i]);
    }
    out += '\n';
  }
  return out;
}

FixedPoint FixedPoint::means(const Dataset& data) {
  if (data.empty()) throw ValidationError("cannot take input means of an empty dataset");
  return {data.input_means(), "training-set means"};
}

FixedPoint FixedPoint::medians(const Dataset& data) {
  if (data.empty()) throw ValidationError("cannot take input medians of an empty dataset");
  return {data.input_medians(), "training-set medians"};
}

FixedPoint FixedPoint::explicit_values(const InputVector& values) { return {values, "explicit values"}; }

std::vector<double> make_axis(const AxisSpec& spec) {
  if (spec.count == 0) throw ArgumentError("grid axis needs at least one point");
  std::vector<double> axis(spec.count);
  if (spec.count == 1) {
    axis[0] = spec.range.min;
    return axis;
  }
  const double step = spec.range.width() / static_cast<double>(spec.count - 1);
  for (std::size_t i = 0; i < spec.count; ++i) axis[i] = spec.range.min + step * static_cast<double>(i);
  axis.back() = spec.range.max;
  return axis;
}

Range default_axis_range(const NetworkModel& model, std::size_t var) {
  const auto& fitted = model.normalization().input(var);
  const auto& work = working_ranges()[var];
  return Range{std::max(fitted.src_min, work.min), std::min(fitted.src_max, work.max)};
}

Surface surface(const NetworkModel& model, std::size_t var_a, std::size_t var_b, const AxisSpec& a, const AxisSpec& b,
                const FixedPoint& fixed) {
  const auto& schema = FeatureSchema::standard();
  if (var_a >= kNumInputs || var_b >= kNumInputs) throw ArgumentError("surface variable index out of range");
  if (var_a == var_b) throw ArgumentError("surface needs two distinct variables");
  for (auto [var, spec] : {std::pair{var_a, a}, std::pair{var_b, b}}) {
    const auto& work = working_ranges()[var];
    if (!(spec.range.min <= spec.range.max) || spec.range.min < work.min || spec.range.max > work.max)
      throw ArgumentError("sweep range for " + schema.describe_input(var) + " [" + text::format_double(spec.range.min) +
                          ", " + text::format_double(spec.range.max) + "] leaves the working range [" +
                          text::format_double(work.min) + ", " + text::format_double(work.max) + "]");
  }
  Surface s{var_a, var_b, make_axis(a), make_axis(b), {}, fixed.values};
  for (auto& grid : s.outputs) grid.reserve(s.axis_a.size() * s.axis_b.size());
  auto x = fixed.values;
  for (double va : s.axis_a) {
    x[var_a] = va;
    for (double vb : s.axis_b) {
      x[var_b] = vb;
      const auto y = predict(model, x);
      for (std::size_t k = 0; k < kNumOutputs; ++k) s.outputs[k].push_back(y[k]);
    }
  }
  return s;
}

std::array<Extremes, kNumOutputs> extremes(const Surface& s) {
  std::array<Extremes, kNumOutputs> out{};
  for (std::size_t k = 0; k < kNumOutputs; ++k) {
    if (s.outputs[k].empty()) throw ArgumentError("surface has no cells");
    const auto [lo, hi] = std::minmax_element(s.outputs[k].begin(), s.outputs[k].end());
    out[k] = Extremes{*lo, *hi - *lo, *hi};
  }
  return out;
}

std::string format_surface(const Surface& s) {
  const auto& schema = FeatureSchema::standard();
  std::string out;
  for (auto var : {s.var_a, s.var_b})
    if (var == kPoles || var == kModulation)
      out += "# " + std::string(schema.input_alias(var)) +
             " is discrete in the design; intermediate grid values are interpolated and non-physical\n";
  out += std::string(schema.input_alias(s.var_a)) + ',' + std::string(schema.input_alias(s.var_b));
  for (std::size_t k = 0; k < kNumOutputs; ++k) out += ',' + std::string(schema.output_name(k));
  out += '\n';
  for (std::size_t a = 0; a < s.axis_a.size(); ++a)
    for (std::size_t b = 0; b < s.axis_b.size(); ++b) {
      out += text::format_double(s.axis_a[a]) + ',' + text::format_double(s.axis_b[b]);
      for (std::size_t k = 0; k < kNumOutputs; ++k) out += ',' + text::format_double(s.at(k, a, b));
      out += '\n';
    }
  return out;
}

}  // namespace punn
