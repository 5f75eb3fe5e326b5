#include "punn/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "punn/error.hpp"
#include "punn/text.hpp"

namespace punn {

namespace {

void put_map(std::string& out, std::string_view keyword, std::string_view name, const AffineMap& m) {
  out += keyword;
  out += ' ';
  out += name;
  for (double v : {m.src_min, m.src_max, m.dst_lo, m.dst_hi}) {
    out += ' ';
    out += text::format_double(v);
  }
  out += '\n';
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) {
    std::size_t start = 0;
    std::size_t number = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++number;
      const auto line = text::trim(text.substr(start, end - start));
      if (!line.empty() && line.front() != '#') lines_.push_back({number, line});
      start = end + 1;
    }
  }

  bool done() const noexcept { return pos_ >= lines_.size(); }

  /// Next line split into tokens; its first token must be `keyword`.
  std::vector<std::string_view> expect(std::string_view keyword, std::size_t n_tokens) {
    if (done()) throw ParseError("unexpected end of model text, expected '" + std::string(keyword) + "'");
    const auto& [number, line] = lines_[pos_++];
    line_ = number;
    auto toks = text::tokens(line);
    if (toks.empty() || toks.front() != keyword)
      throw ParseError("line " + std::to_string(number) + ": expected '" + std::string(keyword) + "'");
    if (n_tokens != 0 && toks.size() != n_tokens)
      throw ParseError("line " + std::to_string(number) + ": '" + std::string(keyword) + "' takes " +
                       std::to_string(n_tokens - 1) + " field(s), found " + std::to_string(toks.size() - 1));
    return toks;
  }

  std::string_view next_raw() {
    if (done()) throw ParseError("empty model text");
    line_ = lines_[pos_].first;
    return lines_[pos_++].second;
  }

  double number(std::string_view token, std::string_view field) const {
    double v = 0.0;
    if (!text::parse_double(token, v))
      throw ParseError("line " + std::to_string(line_) + ": malformed " + std::string(field) + " '" +
                       std::string(token) + "'");
    if (!std::isfinite(v))
      throw ParseError("line " + std::to_string(line_) + ": non-finite " + std::string(field));
    return v;
  }

  std::size_t count(std::string_view token, std::string_view field) const {
    const double v = number(token, field);
    if (v < 0 || v != std::floor(v) || v > 1e6)
      throw ParseError("line " + std::to_string(line_) + ": malformed " + std::string(field) + " '" +
                       std::string(token) + "'");
    return static_cast<std::size_t>(v);
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::vector<std::pair<std::size_t, std::string_view>> lines_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

AffineMap read_map(LineReader& in, std::string_view keyword, std::string_view expected_name) {
  const auto toks = in.expect(keyword, 6);
  if (toks[1] != expected_name)
    throw ParseError("line " + std::to_string(in.line()) + ": expected " + std::string(keyword) + " for " +
                     std::string(expected_name) + ", found " + std::string(toks[1]));
  return AffineMap{in.number(toks[2], "src_min"), in.number(toks[3], "src_max"), in.number(toks[4], "dst_lo"),
                   in.number(toks[5], "dst_hi")};
}

}  // namespace

std::string serialize(const NetworkModel& model) {
  const auto& schema = FeatureSchema::standard();
  std::string out;
  out += kModelFormatTag;
  out += '\n';
  out += "basis ";
  out += to_string(model.basis());
  out += "\nhidden " + std::to_string(model.hidden_count()) + '\n';
  for (std::size_t j = 0; j < model.hidden_count(); ++j) {
    const auto& node = model.hidden()[j];
    out += "node " + std::to_string(j + 1) + " bias " + (node.bias ? text::format_double(*node.bias) : "none") + '\n';
    out += "weights " + std::to_string(node.weights.size());
    for (const auto& [i, w] : node.weights) {
      out += ' ';
      out += schema.input_name(i);
      out += ' ';
      out += text::format_double(w);
    }
    out += "\nbeta";
    for (double b : node.output_coeffs) out += ' ' + text::format_double(b);
    out += '\n';
  }
  out += "output-bias";
  for (double b : model.output_bias()) out += ' ' + text::format_double(b);
  out += '\n';
  const auto& spec = model.normalization();
  out += "input-target " + text::format_double(spec.input_target().lo) + ' ' +
         text::format_double(spec.input_target().hi) + '\n';
  out += "output-target " + text::format_double(spec.output_target().lo) + ' ' +
         text::format_double(spec.output_target().hi) + '\n';
  for (std::size_t i = 0; i < kNumInputs; ++i) put_map(out, "input-map", schema.input_name(i), spec.input(i));
  for (std::size_t k = 0; k < kNumOutputs; ++k) put_map(out, "output-map", schema.output_name(k), spec.output(k));
  out += "end\n";
  return out;
}

NetworkModel deserialize(std::string_view text) {
  const auto& schema = FeatureSchema::standard();
  LineReader in(text);
  const auto tag = in.next_raw();
  constexpr std::string_view prefix = "punn-model/";
  if (tag.substr(0, prefix.size()) != prefix) throw ParseError("missing 'punn-model/<version>' header");
  if (tag != kModelFormatTag) throw UnknownVersionError(std::string(tag.substr(prefix.size())));

  const auto basis_toks = in.expect("basis", 2);
  const auto basis = parse_basis(basis_toks[1]);
  if (!basis) throw ParseError("line " + std::to_string(in.line()) + ": unknown basis '" + std::string(basis_toks[1]) + "'");

  const auto m = in.count(in.expect("hidden", 2)[1], "hidden count");
  std::vector<HiddenNode> hidden(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto node_toks = in.expect("node", 4);
    if (in.count(node_toks[1], "node index") != j + 1 || node_toks[2] != "bias")
      throw ParseError("line " + std::to_string(in.line()) + ": malformed node header");
    if (node_toks[3] != "none") hidden[j].bias = in.number(node_toks[3], "bias");

    const auto w_toks = in.expect("weights", 0);
    if (w_toks.size() < 2) throw ParseError("line " + std::to_string(in.line()) + ": missing weight count");
    const auto n_w = in.count(w_toks[1], "weight count");
    if (w_toks.size() != 2 + 2 * n_w)
      throw ParseError("line " + std::to_string(in.line()) + ": weight count does not match the listed pairs");
    for (std::size_t t = 0; t < n_w; ++t) {
      const auto name = w_toks[2 + 2 * t];
      const auto idx = schema.find_input(name);
      if (!idx) throw ParseError("line " + std::to_string(in.line()) + ": unknown input '" + std::string(name) + "'");
      if (hidden[j].weights.contains(*idx))
        throw ParseError("line " + std::to_string(in.line()) + ": duplicate input '" + std::string(name) + "'");
      const double w = in.number(w_toks[3 + 2 * t], "weight");
      if (w == 0.0) throw ParseError("line " + std::to_string(in.line()) + ": explicit zero weight");
      hidden[j].weights[*idx] = w;
    }
    const auto b_toks = in.expect("beta", 1 + kNumOutputs);
    for (std::size_t k = 0; k < kNumOutputs; ++k) hidden[j].output_coeffs[k] = in.number(b_toks[1 + k], "beta");
  }

  OutputVector bias{};
  const auto ob = in.expect("output-bias", 1 + kNumOutputs);
  for (std::size_t k = 0; k < kNumOutputs; ++k) bias[k] = in.number(ob[1 + k], "output bias");

  const auto it = in.expect("input-target", 3);
  const Interval input_target{in.number(it[1], "interval"), in.number(it[2], "interval")};
  const auto ot = in.expect("output-target", 3);
  const Interval output_target{in.number(ot[1], "interval"), in.number(ot[2], "interval")};

  std::array<AffineMap, kNumInputs> in_maps;
  for (std::size_t i = 0; i < kNumInputs; ++i) in_maps[i] = read_map(in, "input-map", schema.input_name(i));
  std::array<AffineMap, kNumOutputs> out_maps;
  for (std::size_t k = 0; k < kNumOutputs; ++k) out_maps[k] = read_map(in, "output-map", schema.output_name(k));
  in.expect("end", 1);
  if (!in.done()) throw ParseError("trailing content after 'end'");

  try {
    return NetworkModel(*basis, std::move(hidden), bias,
                        NormalizationSpec(in_maps, out_maps, input_target, output_target));
  } catch (const ValidationError& e) {
    throw ParseError(std::string("model is structurally invalid: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const NetworkModel& model, const std::vector<std::string>& header) {
  std::string out;
  for (const auto& line : header) out += "# " + line + '\n';
  out += serialize(model);
  text::write_file_atomic(path, out);
}

NetworkModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace punn
