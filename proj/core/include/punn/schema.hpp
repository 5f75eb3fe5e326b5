#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace punn {

inline constexpr std::size_t kNumInputs = 40;
inline constexpr std::size_t kNumOutputs = 4;

using InputVector = std::array<double, kNumInputs>;
using OutputVector = std::array<double, kNumOutputs>;

enum class Unit { Percent, PoleCount, ModulationIndex, Volts, Amperes };

std::string_view unit_name(Unit u) noexcept;

/// Column naming for the 40 motor inputs and the 4 acoustic outputs.
///
/// Inputs are addressable by their positional name (X1..X40) or by their
/// physical alias (Vthd, Ithd, p, M, V50..V2450, I50..I2450). Outputs are
/// LAEQ (dB), L (loudness), R (roughness) and SA (sharpness).
class FeatureSchema {
 public:
  static const FeatureSchema& standard();

  std::string_view input_name(std::size_t i) const { return positional_[i]; }
  std::string_view input_alias(std::size_t i) const { return aliases_[i]; }
  Unit input_unit(std::size_t i) const { return units_[i]; }
  std::string_view output_name(std::size_t k) const { return outputs_[k]; }

  /// Accepts "X7", "x7" or the alias "V350". Returns nullopt for anything else.
  std::optional<std::size_t> find_input(std::string_view name) const;
  std::optional<std::size_t> find_output(std::string_view name) const;

  /// Both names for error messages, e.g. "X40/I2450".
  std::string describe_input(std::size_t i) const;

 private:
  FeatureSchema();

  std::array<std::string, kNumInputs> positional_;
  std::array<std::string, kNumInputs> aliases_;
  std::array<Unit, kNumInputs> units_;
  std::array<std::string, kNumOutputs> outputs_;
};

struct Range {
  double min;
  double max;
  constexpr bool contains(double v) const noexcept { return v >= min && v <= max; }
  constexpr double width() const noexcept { return max - min; }
};

/// Measured working ranges of the 40 inputs, native units, indexed like InputVector.
const std::array<Range, kNumInputs>& working_ranges();

/// Harmonic frequencies (Hz) of the voltage inputs X5..X21 and current inputs X22..X40.
inline constexpr std::array<int, 17> kVoltageHarmonicsHz{50,   250,  350,  550,  650,  850,  950,  1150, 1250,
                                                         1450, 1550, 1750, 1850, 2050, 2150, 2350, 2450};
inline constexpr std::array<int, 19> kCurrentHarmonicsHz{50,   100,  200,  250,  350,  550,  650,
                                                         850,  950,  1150, 1250, 1450, 1550, 1750,
                                                         1850, 2050, 2150, 2350, 2450};

inline constexpr std::size_t kVthd = 0;
inline constexpr std::size_t kIthd = 1;
inline constexpr std::size_t kPoles = 2;
inline constexpr std::size_t kModulation = 3;
inline constexpr std::size_t kFirstVoltage = 4;   // X5 = V50
inline constexpr std::size_t kFirstCurrent = 21;  // X22 = I50

/// Index for X<k>, 1-based as written in the literature.
constexpr std::size_t x(std::size_t k) noexcept { return k - 1; }

}  // namespace punn
