#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "punn/dataset.hpp"
#include "punn/metrics.hpp"
#include "punn/netmodel.hpp"
#include "punn/normalization.hpp"
#include "punn/rng.hpp"

namespace punn {

struct WeightRange {
  double lo;
  double hi;
  constexpr double width() const noexcept { return hi - lo; }
  friend constexpr bool operator==(WeightRange, WeightRange) = default;
};

/// Evolutionary programming settings. `defaults()` reproduces the published
/// configuration (30 runs x 200 generations, population 1000, one initial
/// hidden node, at most three); `complex_mode()` only raises the generation
/// budget to 6000.
struct EAConfig {
  int runs = 30;
  int generations = 200;
  std::size_t population_size = 1000;
  int nodes_add_delete_min = 1;
  int nodes_add_delete_max = 2;
  int min_init_nodes = 1;
  int max_init_nodes = 1;
  int max_nodes = 3;
  WeightRange input_hidden{-1.0, 1.0};
  WeightRange hidden_output{-5.0, 5.0};
  std::uint64_t seed = 1;

  /// Top fraction copied unchanged into the next generation.
  double elite_fraction = 0.1;
  /// Slots filled by parametric mutants of the top-ranked individuals.
  double parametric_fraction = 0.1;
  /// Slots filled by structural mutants of rank-selected parents from the top half.
  double structural_fraction = 0.8;

  /// Initial (input->hidden, hidden->output) temperatures. Mutation SD is
  /// temperature x range width; both decay by `temperature_decay` after every
  /// generation whose best fitness did not improve, down to `temperature_floor`.
  double initial_temperature_hidden = 1.0;
  double initial_temperature_output = 0.1;
  double temperature_decay = 0.9;
  double temperature_floor = 1e-4;

  /// Re-solve the output layer (coefficients and biases) by linear least
  /// squares on the training set after every mutation, so evolution only has
  /// to search the hidden layer. When false, output weights evolve by
  /// parametric mutation like every other weight.
  bool refit_output_layer = true;

  /// Chance that a new hidden node connects to any given input (at least one is forced).
  double init_connection_probability = 0.25;

  Interval input_interval = kDefaultInputInterval;
  Interval output_interval = kDefaultOutputInterval;

  /// Worker threads for fitness evaluation; 0 uses the hardware concurrency.
  unsigned threads = 1;
  /// Optional wall-clock cap per run. Breaks reproducibility when it triggers.
  std::optional<double> time_budget_seconds;

  static EAConfig defaults(BasisKind basis);
  static EAConfig complex_mode(BasisKind basis);

  /// Throws ArgumentError describing the first violated constraint.
  void validate() const;
};

using Population = std::vector<NetworkModel>;

/// Random population of `population_size` networks with between
/// min_init_nodes and max_init_nodes hidden nodes each.
Population init_population(const EAConfig& config, const NormalizationSpec& normalization, BasisKind basis,
                           Rng& rng);

/// A fresh random hidden node drawn exactly like the initial population's nodes.
HiddenNode random_node(const EAConfig& config, BasisKind basis, Rng& rng);

/// Normalized training set prepared for repeated evaluation.
class TrainingSet {
 public:
  /// `data` in native units; it is normalized with `spec` (no positivity
  /// check, product units report domain errors at evaluation time).
  TrainingSet(const Dataset& data, const NormalizationSpec& spec);

  std::size_t size() const noexcept { return n_; }

  /// Global (summed over outputs) MSE in normalized output space. Throws
  /// DomainError/NumericError like predict_normalized.
  double normalized_mse(const NetworkModel& model) const;

  /// Copy of `model` whose output coefficients and biases minimize the
  /// normalized training MSE for its current hidden layer. Returns `model`
  /// unchanged when the least-squares system is singular or non-finite.
  NetworkModel refit_output_layer(const NetworkModel& model) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> x_;
  std::vector<double> log_x_;
  std::vector<double> y_;
  std::array<bool, kNumInputs> positive_{};

  std::vector<double> basis_values(const NetworkModel& model) const;
};

/// 1 / (1 + global normalized MSE); 0 for a model that fails to evaluate.
double fitness(const NetworkModel& model, const TrainingSet& train) noexcept;
double fitness(const NetworkModel& model, const Dataset& train);

struct Temperatures {
  double hidden;
  double output;
};

/// Gaussian perturbation of every existing parameter (no links created or
/// destroyed). Input->hidden weights and hidden biases use SD
/// temps.hidden x input_hidden.width(); output coefficients and output biases
/// use temps.output x hidden_output.width().
NetworkModel parametric_mutation(const NetworkModel& model, const EAConfig& config, Temperatures temps, Rng& rng);

enum class StructuralOp { AddNodes, DeleteNodes, AddConnection, DeleteConnection };

std::string_view to_string(StructuralOp op) noexcept;

struct StructuralOutcome {
  NetworkModel model;
  StructuralOp op;
  /// False when the chosen operator had nothing to do (node limits reached,
  /// every node fully connected, ...) and `model` is the unchanged parent.
  bool applied;
};

/// Applies one operator drawn uniformly from StructuralOp.
StructuralOutcome structural_mutation(const NetworkModel& model, const EAConfig& config, Rng& rng);

/// Applies a specific operator; exposed for testing the individual rules.
StructuralOutcome apply_structural(const NetworkModel& model, StructuralOp op, const EAConfig& config, Rng& rng);

struct GenerationRecord {
  int generation;
  double best_fitness;
  double best_mse;
};

struct RunHistory {
  std::vector<GenerationRecord> generations;
  std::size_t structural_skips = 0;
  double wall_seconds = 0.0;
  bool stopped_by_budget = false;
};

/// generation,best_fitness,best_mse lines under a header row.
std::string format_history(const RunHistory& history);

struct EvolveResult {
  NetworkModel best;
  RunHistory history;
};

/// One evolutionary run on `train` (native units). The normalizer is fitted on
/// `train` with the configured intervals and attached to every individual.
EvolveResult evolve(const Dataset& train, const EAConfig& config, BasisKind basis);

struct RunSummary {
  std::uint64_t seed;
  MetricReport train;
  MetricReport test;
  double train_normalized_mse;
  std::size_t links;
};

struct AggregateResult {
  std::vector<RunSummary> runs;
  MetricRow mean;
  MetricRow sd;
  MetricRow best;
  std::size_t best_run;
  NetworkModel best_model;
  RunHistory best_history;
  /// Test input values raised to the training minimum before scoring (product units only).
  std::size_t clamped_test_inputs = 0;
};

/// `config.runs` independent evolve calls with seeds seed, seed+1, ...; test
/// metrics in native units; mean and sample SD over runs; the best run is the
/// one with the lowest normalized training MSE. For product units, test inputs
/// below the training minimum are clamped to it before scoring.
AggregateResult run_experiment(const Dataset& train, const Dataset& test, const EAConfig& config, BasisKind basis);

/// Mean / SD / Best rows in the published table layout.
std::string render_aggregate(const AggregateResult& result, std::string_view title);

}  // namespace punn
