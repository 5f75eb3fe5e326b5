#pragma once

#include <array>
#include <string>
#include <vector>

#include "punn/dataset.hpp"
#include "punn/netmodel.hpp"
#include "punn/schema.hpp"

namespace punn {

enum class Sign { Negative, Zero, Positive };

char sign_symbol(Sign s) noexcept;

/// d f_k / d x_i at a nominal point, both sides in normalized units.
struct InfluenceReport {
  InputVector nominal{};
  std::array<InputVector, kNumOutputs> slopes{};
  std::array<std::array<Sign, kNumInputs>, kNumOutputs> signs{};
};

/// Analytic partial derivatives of every output with respect to every input.
/// Product unit: dB/dx_i = w_i B / x_i. Sigmoid unit: dB/dx_i = w_i B (1 - B).
/// Inputs no hidden node connects to get an exact zero.
InfluenceReport influence(const NetworkModel& model, const InputVector& nominal_normalized);

/// Rows per output, columns per input: slope and sign.
std::string format_influence(const InfluenceReport& report);

/// Values held by the 38 inputs that a surface does not sweep.
struct FixedPoint {
  InputVector values{};
  std::string description;

  static FixedPoint means(const Dataset& data);
  static FixedPoint medians(const Dataset& data);
  static FixedPoint explicit_values(const InputVector& values);
};

struct AxisSpec {
  std::size_t count;
  Range range;  // native units
};

/// Model outputs over a two-variable grid, native units. Grids are row-major:
/// cell (a, b) is at index a * axis_b.size() + b.
struct Surface {
  std::size_t var_a;
  std::size_t var_b;
  std::vector<double> axis_a;
  std::vector<double> axis_b;
  std::array<std::vector<double>, kNumOutputs> outputs;
  InputVector fixed{};

  double at(std::size_t k, std::size_t a, std::size_t b) const { return outputs[k][a * axis_b.size() + b]; }
};

/// Evenly spaced axis; a single-point axis sits at range.min.
std::vector<double> make_axis(const AxisSpec& spec);

/// Default sweep range for `var`: the span the model's input normalization was
/// fitted on, clipped to the working range.
Range default_axis_range(const NetworkModel& model, std::size_t var);

/// Evaluates predict over the grid. Throws ArgumentError when var_a == var_b or
/// when a range leaves the variable's working range (the message names it).
Surface surface(const NetworkModel& model, std::size_t var_a, std::size_t var_b, const AxisSpec& a, const AxisSpec& b,
                const FixedPoint& fixed);

struct Extremes {
  double min;
  double span;
  double max;
};

/// Per-output (min, max - min, max) over all cells.
std::array<Extremes, kNumOutputs> extremes(const Surface& s);

/// One row per cell: var_a, var_b, LAEQ, L, R, SA.
std::string format_surface(const Surface& s);

}  // namespace punn
