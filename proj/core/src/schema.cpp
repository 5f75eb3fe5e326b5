#include "punn/schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace punn {

std::string_view unit_name(Unit u) noexcept {
  switch (u) {
    case Unit::Percent: return "percent";
    case Unit::PoleCount: return "pole-count";
    case Unit::ModulationIndex: return "modulation-index";
    case Unit::Volts: return "volts";
    case Unit::Amperes: return "amperes";
  }
  return "?";
}

FeatureSchema::FeatureSchema() {
  for (std::size_t i = 0; i < kNumInputs; ++i) positional_[i] = "X" + std::to_string(i + 1);

  aliases_[kVthd] = "Vthd";
  aliases_[kIthd] = "Ithd";
  aliases_[kPoles] = "p";
  aliases_[kModulation] = "M";
  units_[kVthd] = Unit::Percent;
  units_[kIthd] = Unit::Percent;
  units_[kPoles] = Unit::PoleCount;
  units_[kModulation] = Unit::ModulationIndex;
  for (std::size_t h = 0; h < kVoltageHarmonicsHz.size(); ++h) {
    aliases_[kFirstVoltage + h] = "V" + std::to_string(kVoltageHarmonicsHz[h]);
    units_[kFirstVoltage + h] = Unit::Volts;
  }
  for (std::size_t h = 0; h < kCurrentHarmonicsHz.size(); ++h) {
    aliases_[kFirstCurrent + h] = "I" + std::to_string(kCurrentHarmonicsHz[h]);
    units_[kFirstCurrent + h] = Unit::Amperes;
  }
  outputs_ = {"LAEQ", "L", "R", "SA"};
}

const FeatureSchema& FeatureSchema::standard() {
  static const FeatureSchema schema;
  return schema;
}

std::optional<std::size_t> FeatureSchema::find_input(std::string_view name) const {
  if (name.size() >= 2 && (name[0] == 'X' || name[0] == 'x')) {
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
    if (ec == std::errc{} && ptr == name.data() + name.size() && k >= 1 && k <= kNumInputs) return k - 1;
  }
  auto it = std::find(aliases_.begin(), aliases_.end(), name);
  if (it != aliases_.end()) return static_cast<std::size_t>(it - aliases_.begin());
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::find_output(std::string_view name) const {
  for (std::size_t k = 0; k < kNumOutputs; ++k) {
    const auto& out = outputs_[k];
    if (out.size() == name.size() &&
        std::equal(out.begin(), out.end(), name.begin(), [](char a, char b) {
          return std::toupper(static_cast<unsigned char>(a)) == std::toupper(static_cast<unsigned char>(b));
        }))
      return k;
  }
  return std::nullopt;
}

std::string FeatureSchema::describe_input(std::size_t i) const { return positional_[i] + "/" + aliases_[i]; }

const std::array<Range, kNumInputs>& working_ranges() {
  static const std::array<Range, kNumInputs> ranges{{
      {6.70, 229.60},    // X1  Vthd (%)
      {1.80, 411.10},    // X2  Ithd (%)
      {2.00, 12.00},     // X3  p
      {5.00, 21.00},     // X4  M
      {0.32, 244.60},    // X5  V50
      {0.02, 121.40},    // X6  V250
      {0.02, 95.20},     // X7  V350
      {0.03, 87.60},     // X8  V550
      {0.01, 99.10},     // X9  V650
      {0.02, 96.50},     // X10 V850
      {0.02, 92.70},     // X11 V950
      {0.02, 82.90},     // X12 V1150
      {0.06, 80.30},     // X13 V1250
      {0.03, 86.30},     // X14 V1450
      {0.03, 69.40},     // X15 V1550
      {2.0e-3, 72.70},   // X16 V1750
      {1.0e-3, 78.90},   // X17 V1850
      {3.0e-3, 67.00},   // X18 V2050
      {0.01, 65.10},     // X19 V2150
      {0.01, 68.20},     // X20 V2350
      {8.0e-3, 68.30},   // X21 V2450
      {0.04, 0.38},      // X22 I50
      {4.4e-5, 0.05},    // X23 I100
      {4.4e-5, 0.02},    // X24 I200
      {7.0e-5, 0.50},    // X25 I250
      {1.2e-4, 0.30},    // X26 I350
      {1.6e-4, 0.17},    // X27 I550
      {5.1e-5, 0.17},    // X28 I650
      {5.3e-5, 0.12},    // X29 I850
      {4.3e-5, 0.11},    // X30 I950
      {4.6e-5, 0.07},    // X31 I1150
      {2.1e-5, 0.07},    // X32 I1250
      {4.0e-5, 0.07},    // X33 I1450
      {3.6e-5, 0.05},    // X34 I1550
      {2.6e-5, 0.05},    // X35 I1750
      {2.7e-5, 0.05},    // X36 I1850
      {2.3e-5, 0.04},    // X37 I2050
      {2.7e-5, 0.03},    // X38 I2150
      {3.7e-5, 0.03},    // X39 I2350
      {1.7e-5, 0.03},    // X40 I2450
  }};
  return ranges;
}

}  // namespace punn
