#include "punn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "punn/error.hpp"
#include "punn/text.hpp"

namespace punn {

Dataset::Dataset(std::vector<Pattern> patterns, std::vector<std::string> provenance, bool has_outputs)
    : patterns_(std::move(patterns)), provenance_(std::move(provenance)), has_outputs_(has_outputs) {}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Pattern> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(patterns_.at(i));
  return Dataset(std::move(out), provenance_, has_outputs_);
}

Dataset Dataset::with_provenance(std::vector<std::string> lines) const {
  return Dataset(patterns_, std::move(lines), has_outputs_);
}

std::vector<OutputVector> Dataset::outputs() const {
  std::vector<OutputVector> out;
  out.reserve(patterns_.size());
  for (const auto& p : patterns_) out.push_back(p.outputs);
  return out;
}

OutputVector Dataset::output_means() const {
  OutputVector sum{};
  for (const auto& p : patterns_)
    for (std::size_t k = 0; k < kNumOutputs; ++k) sum[k] += p.outputs[k];
  if (!patterns_.empty())
    for (auto& s : sum) s /= static_cast<double>(patterns_.size());
  return sum;
}

InputVector Dataset::input_means() const {
  InputVector sum{};
  for (const auto& p : patterns_)
    for (std::size_t i = 0; i < kNumInputs; ++i) sum[i] += p.inputs[i];
  if (!patterns_.empty())
    for (auto& s : sum) s /= static_cast<double>(patterns_.size());
  return sum;
}

InputVector Dataset::input_medians() const {
  InputVector med{};
  if (patterns_.empty()) return med;
  std::vector<double> column(patterns_.size());
  for (std::size_t i = 0; i < kNumInputs; ++i) {
    for (std::size_t r = 0; r < patterns_.size(); ++r) column[r] = patterns_[r].inputs[i];
    std::sort(column.begin(), column.end());
    const auto n = column.size();
    med[i] = n % 2 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return med;
}

namespace {

enum class ColumnKind { Input, Output };

struct Column {
  ColumnKind kind;
  std::size_t index;
  std::string name;
};

std::vector<Column> parse_header(std::string_view line, const FeatureSchema& schema, bool require_outputs,
                                 bool& has_outputs) {
  std::vector<Column> columns;
  std::array<bool, kNumInputs> seen_in{};
  std::array<bool, kNumOutputs> seen_out{};
  for (auto raw : text::split(line, ',')) {
    const auto name = text::trim(raw);
    if (auto i = schema.find_input(name)) {
      if (seen_in[*i]) throw SchemaError("duplicate column '" + std::string(name) + "'");
      seen_in[*i] = true;
      columns.push_back({ColumnKind::Input, *i, std::string(name)});
    } else if (auto k = schema.find_output(name)) {
      if (seen_out[*k]) throw SchemaError("duplicate column '" + std::string(name) + "'");
      seen_out[*k] = true;
      columns.push_back({ColumnKind::Output, *k, std::string(name)});
    } else {
      throw SchemaError("unexpected column '" + std::string(name) + "'");
    }
  }
  for (std::size_t i = 0; i < kNumInputs; ++i)
    if (!seen_in[i]) throw SchemaError("missing column " + schema.describe_input(i));
  const auto n_out = std::count(seen_out.begin(), seen_out.end(), true);
  if (n_out == 0 && !require_outputs) {
    has_outputs = false;
    return columns;
  }
  for (std::size_t k = 0; k < kNumOutputs; ++k)
    if (!seen_out[k]) throw SchemaError("missing column " + std::string(schema.output_name(k)));
  has_outputs = true;
  return columns;
}

void check_ranges(const std::vector<Pattern>& rows, const FeatureSchema& schema, const LoadOptions& options,
                  std::string_view source) {
  if (options.range_check == RangeCheck::Off) return;
  const auto& ranges = working_ranges();
  for (std::size_t i = 0; i < kNumInputs; ++i) {
    std::size_t violations = 0;
    std::size_t first_row = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!ranges[i].contains(rows[r].inputs[i])) {
        if (violations++ == 0) first_row = r + 1;
      }
    }
    if (violations == 0) continue;
    std::ostringstream msg;
    msg << source << ": " << violations << " value(s) of " << schema.describe_input(i) << " outside working range ["
        << ranges[i].min << ", " << ranges[i].max << "], first at row " << first_row;
    if (options.range_check == RangeCheck::Fail) throw ValidationError(msg.str());
    if (options.on_warning)
      options.on_warning(msg.str());
    else
      std::cerr << "warning: " << msg.str() << '\n';
  }
}

}  // namespace

Dataset parse_dataset(std::istream& in, std::string_view source, const FeatureSchema& schema,
                      const LoadOptions& options) {
  std::vector<std::string> provenance;
  std::vector<Column> columns;
  std::vector<Pattern> rows;
  bool has_header = false;
  bool has_outputs = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = text::trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (!has_header) provenance.emplace_back(text::trim(view.substr(1)));
      continue;
    }
    if (!has_header) {
      columns = parse_header(view, schema, options.require_outputs, has_outputs);
      has_header = true;
      continue;
    }
    const auto cells = text::split(view, ',');
    const auto row_no = rows.size() + 1;
    if (cells.size() != columns.size()) {
      throw ParseError(std::string(source) + " row " + std::to_string(row_no) + " (line " + std::to_string(line_no) +
                       "): expected " + std::to_string(columns.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    Pattern p;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!text::parse_double(cells[c], v)) {
        throw ParseError(std::string(source) + " row " + std::to_string(row_no) + ", column " + columns[c].name +
                         ": cannot parse '" + std::string(text::trim(cells[c])) + "'");
      }
      if (!std::isfinite(v)) {
        throw ValidationError(std::string(source) + " row " + std::to_string(row_no) + ", column " +
                              columns[c].name + ": non-finite value");
      }
      if (columns[c].kind == ColumnKind::Input)
        p.inputs[columns[c].index] = v;
      else
        p.outputs[columns[c].index] = v;
    }
    rows.push_back(p);
  }
  if (!has_header) throw SchemaError(std::string(source) + ": missing header row");
  check_ranges(rows, schema, options, source);
  return Dataset(std::move(rows), std::move(provenance), has_outputs);
}

Dataset load_dataset(const std::filesystem::path& path, const FeatureSchema& schema, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.string(), schema, options);
}

std::string format_dataset(const Dataset& data, HeaderStyle style, const FeatureSchema& schema) {
  std::string out;
  out.reserve(64 + data.size() * 44 * 12);
  for (const auto& line : data.provenance()) {
    out += "# ";
    out += line;
    out += '\n';
  }
  for (std::size_t i = 0; i < kNumInputs; ++i) {
    if (i) out += ',';
    out += style == HeaderStyle::Alias ? schema.input_alias(i) : schema.input_name(i);
  }
  if (data.has_outputs())
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      out += ',';
      out += schema.output_name(k);
    }
  out += '\n';
  for (const auto& p : data) {
    for (std::size_t i = 0; i < kNumInputs; ++i) {
      if (i) out += ',';
      out += text::format_double(p.inputs[i]);
    }
    if (data.has_outputs())
      for (std::size_t k = 0; k < kNumOutputs; ++k) {
        out += ',';
        out += text::format_double(p.outputs[k]);
      }
    out += '\n';
  }
  return out;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data, HeaderStyle style) {
  text::write_file_atomic(path, format_dataset(data, style));
}

TrainTest split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train fraction must lie in (0, 1), got " + text::format_double(train_fraction));
  const auto n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  std::shuffle(order.begin(), order.end(), engine);
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {data.subset(train), data.subset(test)};
}

}  // namespace punn
