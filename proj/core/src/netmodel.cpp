#include "punn/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "punn/error.hpp"
#include "punn/synth.hpp"
#include "punn/text.hpp"

namespace punn {

std::string_view to_string(BasisKind kind) noexcept {
  return kind == BasisKind::ProductUnit ? "product-unit" : "sigmoid-unit";
}

std::optional<BasisKind> parse_basis(std::string_view name) noexcept {
  if (name == "punn" || name == "product" || name == "product-unit") return BasisKind::ProductUnit;
  if (name == "sunn" || name == "sigmoid" || name == "sigmoid-unit") return BasisKind::SigmoidUnit;
  return std::nullopt;
}

void HiddenNode::set_weight(std::size_t i, double w) {
  if (w == 0.0)
    weights.erase(i);
  else
    weights[i] = w;
}

NetworkModel::NetworkModel(BasisKind basis, std::vector<HiddenNode> hidden, OutputVector output_bias,
                           NormalizationSpec normalization)
    : basis_(basis), hidden_(std::move(hidden)), output_bias_(output_bias), normalization_(std::move(normalization)) {
  if (hidden_.empty()) throw ValidationError("network needs at least one hidden node");
  for (std::size_t j = 0; j < hidden_.size(); ++j) {
    const auto& node = hidden_[j];
    const auto label = "hidden node " + std::to_string(j + 1);
    if (node.weights.empty()) throw ValidationError(label + " has no input connections");
    for (const auto& [i, w] : node.weights) {
      if (i >= kNumInputs) throw ValidationError(label + " references input index " + std::to_string(i));
      if (w == 0.0) throw ValidationError(label + " stores an explicit zero weight");
      if (!std::isfinite(w)) throw ValidationError(label + " has a non-finite weight");
    }
    if (basis_ == BasisKind::ProductUnit && node.bias)
      throw ValidationError(label + ": product units carry no bias");
    if (basis_ == BasisKind::SigmoidUnit && !node.bias) throw ValidationError(label + ": sigmoid unit needs a bias");
    if (node.bias && !std::isfinite(*node.bias)) throw ValidationError(label + " has a non-finite bias");
    for (double b : node.output_coeffs)
      if (!std::isfinite(b)) throw ValidationError(label + " has a non-finite output coefficient");
  }
  for (double b : output_bias_)
    if (!std::isfinite(b)) throw ValidationError("non-finite output bias");
}

std::vector<std::size_t> NetworkModel::connected_inputs() const {
  std::set<std::size_t> inputs;
  for (const auto& node : hidden_)
    for (const auto& [i, w] : node.weights) inputs.insert(i);
  return {inputs.begin(), inputs.end()};
}

NetworkModel NetworkModel::with_normalization(NormalizationSpec spec) const {
  return NetworkModel(basis_, hidden_, output_bias_, std::move(spec));
}

double eval_basis(const HiddenNode& node, BasisKind basis, std::span<const double, kNumInputs> x,
                  std::size_t node_index) {
  auto label = [&] {
    return node_index == kNoNode ? std::string("hidden node") : "hidden node " + std::to_string(node_index + 1);
  };
  if (basis == BasisKind::ProductUnit) {
    double log_sum = 0.0;
    for (const auto& [i, w] : node.weights) {
      if (!(x[i] > 0.0)) {
        throw DomainError(label() + ": input " + FeatureSchema::standard().describe_input(i) + " = " +
                          text::format_double(x[i]) + " is not strictly positive");
      }
      log_sum += w * std::log(x[i]);
    }
    const double value = std::exp(log_sum);
    if (!std::isfinite(value) || !std::isfinite(log_sum)) throw NumericError(label() + ": product unit overflowed");
    return value;
  }
  double net = node.bias.value_or(0.0);
  for (const auto& [i, w] : node.weights) net += w * x[i];
  if (!std::isfinite(net)) throw NumericError(label() + ": non-finite sigmoid activation");
  if (net >= 0.0) return 1.0 / (1.0 + std::exp(-net));
  const double e = std::exp(net);
  return e / (1.0 + e);
}

OutputVector predict_normalized(const NetworkModel& model, const InputVector& x_normalized) {
  OutputVector y = model.output_bias();
  const auto& hidden = model.hidden();
  for (std::size_t j = 0; j < hidden.size(); ++j) {
    const double b = eval_basis(hidden[j], model.basis(), x_normalized, j);
    for (std::size_t k = 0; k < kNumOutputs; ++k) y[k] += hidden[j].output_coeffs[k] * b;
  }
  for (std::size_t k = 0; k < kNumOutputs; ++k)
    if (!std::isfinite(y[k])) throw NumericError("non-finite output " + std::string(FeatureSchema::standard().output_name(k)));
  return y;
}

OutputVector predict(const NetworkModel& model, const InputVector& x_native) {
  const auto& spec = model.normalization();
  return spec.denormalize_outputs(predict_normalized(model, spec.normalize_inputs(x_native)));
}

std::size_t count_links(const NetworkModel& model) noexcept {
  std::size_t links = kNumOutputs;
  for (const auto& node : model.hidden()) {
    links += node.weights.size();
    if (node.bias) ++links;
    links += static_cast<std::size_t>(
        std::count_if(node.output_coeffs.begin(), node.output_coeffs.end(), [](double b) { return b != 0.0; }));
  }
  return links;
}

NetworkModel reference_punn(const NormalizationSpec& normalization) {
  HiddenNode b;
  // Numerator exponents.
  b.set_weight(x(4), 0.016);
  b.set_weight(x(15), 0.209);
  b.set_weight(x(20), 0.077);
  b.set_weight(x(26), 0.628);
  b.set_weight(x(39), 0.088);
  // Denominator exponents.
  b.set_weight(x(3), -3.532);
  b.set_weight(x(5), -1.415);
  b.set_weight(x(6), -0.044);
  b.set_weight(x(19), -0.016);
  b.set_weight(x(24), -0.145);
  b.output_coeffs = {1.046, 0.449, 0.022, 0.131};
  return NetworkModel(BasisKind::ProductUnit, {b}, OutputVector{0.192, 0.318, 0.234, 0.330}, normalization);
}

NetworkModel reference_punn() { return reference_punn(synth::reference_normalization()); }

}  // namespace punn
