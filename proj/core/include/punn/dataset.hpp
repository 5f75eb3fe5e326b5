#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "punn/schema.hpp"

namespace punn {

/// One motor test: 40 inputs and 4 acoustic outputs, native units.
struct Pattern {
  InputVector inputs{};
  OutputVector outputs{};
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Ordered, immutable collection of patterns.
///
/// Provenance lines are the `#` comment lines found at the top of a CSV file
/// (without the leading `#`); they are carried along and re-emitted on save.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Pattern> patterns, std::vector<std::string> provenance = {}, bool has_outputs = true);

  std::size_t size() const noexcept { return patterns_.size(); }
  bool empty() const noexcept { return patterns_.empty(); }
  const Pattern& operator[](std::size_t i) const { return patterns_[i]; }
  auto begin() const noexcept { return patterns_.begin(); }
  auto end() const noexcept { return patterns_.end(); }
  std::span<const Pattern> patterns() const noexcept { return patterns_; }
  const std::vector<std::string>& provenance() const noexcept { return provenance_; }

  /// False for prediction inputs loaded without the four output columns.
  bool has_outputs() const noexcept { return has_outputs_; }

  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset with_provenance(std::vector<std::string> lines) const;

  std::vector<OutputVector> outputs() const;
  OutputVector output_means() const;
  InputVector input_means() const;
  InputVector input_medians() const;

 private:
  std::vector<Pattern> patterns_;
  std::vector<std::string> provenance_;
  bool has_outputs_ = true;
};

enum class RangeCheck { Off, Warn, Fail };

struct LoadOptions {
  RangeCheck range_check = RangeCheck::Warn;
  /// When false, the four output columns may be absent (prediction input).
  bool require_outputs = true;
  /// Receives range-check warnings. Defaults to stderr when empty.
  std::function<void(std::string_view)> on_warning;
};

Dataset load_dataset(const std::filesystem::path& path, const FeatureSchema& schema = FeatureSchema::standard(),
                     const LoadOptions& options = {});

/// Same as load_dataset, reading from an already open stream. `source` names it in messages.
Dataset parse_dataset(std::istream& in, std::string_view source, const FeatureSchema& schema = FeatureSchema::standard(),
                      const LoadOptions& options = {});

enum class HeaderStyle { Positional, Alias };

/// CSV text: provenance comment lines, header row, one row per pattern.
std::string format_dataset(const Dataset& data, HeaderStyle style = HeaderStyle::Alias,
                           const FeatureSchema& schema = FeatureSchema::standard());

void save_dataset(const std::filesystem::path& path, const Dataset& data, HeaderStyle style = HeaderStyle::Alias);

struct TrainTest {
  Dataset train;
  Dataset test;
};

/// Seeded shuffle, then the first round(n * train_fraction) patterns form the training set.
TrainTest split(const Dataset& data, double train_fraction, std::uint64_t seed);

}  // namespace punn
