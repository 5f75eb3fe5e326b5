#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "punn/normalization.hpp"
#include "punn/schema.hpp"

namespace punn {

enum class BasisKind { ProductUnit, SigmoidUnit };

std::string_view to_string(BasisKind kind) noexcept;
/// Accepts "punn", "product", "product-unit", "sunn", "sigmoid", "sigmoid-unit".
std::optional<BasisKind> parse_basis(std::string_view name) noexcept;

/// One hidden basis function plus its fan-out to the four outputs.
///
/// `weights` is sparse: an absent input has weight exactly zero and is not a
/// link. Product units never carry a bias; sigmoid units always do. An output
/// coefficient of exactly zero is likewise "no link".
struct HiddenNode {
  std::map<std::size_t, double> weights;
  std::optional<double> bias;
  OutputVector output_coeffs{};

  /// Stores `w` for input `i`, erasing the entry when `w == 0`.
  void set_weight(std::size_t i, double w);
  std::size_t connections() const noexcept { return weights.size(); }

  friend bool operator==(const HiddenNode&, const HiddenNode&) = default;
};

/// Single-hidden-layer multitask network: f_k(x) = beta_k0 + sum_j beta_kj B_j(x).
///
/// Hidden nodes and the output layer operate on normalized inputs/outputs as
/// defined by the attached NormalizationSpec. Instances are immutable and
/// validated on construction.
class NetworkModel {
 public:
  NetworkModel(BasisKind basis, std::vector<HiddenNode> hidden, OutputVector output_bias,
               NormalizationSpec normalization);

  BasisKind basis() const noexcept { return basis_; }
  const std::vector<HiddenNode>& hidden() const noexcept { return hidden_; }
  std::size_t hidden_count() const noexcept { return hidden_.size(); }
  const OutputVector& output_bias() const noexcept { return output_bias_; }
  const NormalizationSpec& normalization() const noexcept { return normalization_; }
  double output_coeff(std::size_t k, std::size_t j) const { return hidden_.at(j).output_coeffs.at(k); }

  /// Set of inputs with at least one nonzero weight anywhere in the network.
  std::vector<std::size_t> connected_inputs() const;

  NetworkModel with_normalization(NormalizationSpec spec) const;

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;

 private:
  BasisKind basis_;
  std::vector<HiddenNode> hidden_;
  OutputVector output_bias_;
  NormalizationSpec normalization_;
};

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

/// Hidden basis value at a normalized input vector.
///
/// Product units are evaluated as exp(sum w_i ln x_i); a non-positive input
/// feeding a nonzero exponent raises DomainError. A non-finite result raises
/// NumericError. `node_index` only labels the error messages.
double eval_basis(const HiddenNode& node, BasisKind basis, std::span<const double, kNumInputs> x,
                  std::size_t node_index = kNoNode);

/// Output-layer evaluation in normalized space.
OutputVector predict_normalized(const NetworkModel& model, const InputVector& x_normalized);

/// Native-unit prediction: normalize, evaluate, denormalize.
OutputVector predict(const NetworkModel& model, const InputVector& x_native);

/// nonzero input->hidden weights + hidden biases + nonzero hidden->output
/// coefficients + the four output biases.
std::size_t count_links(const NetworkModel& model) noexcept;

/// The published best product-unit model (one hidden node over ten inputs).
NetworkModel reference_punn(const NormalizationSpec& normalization);

/// reference_punn with the default normalization fitted to the synthetic design
/// dataset (see synth::reference_normalization).
NetworkModel reference_punn();

}  // namespace punn
