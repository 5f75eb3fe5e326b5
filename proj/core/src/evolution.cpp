#include "punn/evolution.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "punn/error.hpp"
#include "punn/text.hpp"

namespace punn {

EAConfig EAConfig::defaults(BasisKind basis) {
  EAConfig c;
  if (basis == BasisKind::SigmoidUnit) c.input_hidden = {-5.0, 5.0};
  return c;
}

EAConfig EAConfig::complex_mode(BasisKind basis) {
  auto c = defaults(basis);
  c.generations = 6000;
  return c;
}

void EAConfig::validate() const {
  auto fail = [](const std::string& what) { throw ArgumentError("EA config: " + what); };
  if (runs < 1) fail("runs must be >= 1");
  if (generations < 0) fail("generations must be >= 0");
  if (population_size < 1) fail("population size must be >= 1");
  if (nodes_add_delete_min < 1 || nodes_add_delete_max < nodes_add_delete_min)
    fail("node add/delete range must satisfy 1 <= min <= max");
  if (min_init_nodes < 1 || max_init_nodes < min_init_nodes || max_nodes < max_init_nodes)
    fail("node limits must satisfy 1 <= min_init <= max_init <= max_nodes");
  if (!(input_hidden.lo < input_hidden.hi) || !(hidden_output.lo < hidden_output.hi))
    fail("weight ranges must satisfy lo < hi");
  for (double f : {elite_fraction, parametric_fraction, structural_fraction})
    if (!(f > 0.0 && f < 1.0)) fail("population fractions must lie in (0, 1)");
  if (std::abs(elite_fraction + parametric_fraction + structural_fraction - 1.0) > 1e-9)
    fail("elite, parametric and structural fractions must sum to 1");
  if (!(initial_temperature_hidden >= 0.0) || !(initial_temperature_output >= 0.0))
    fail("temperatures must be >= 0");
  if (!(temperature_decay > 0.0 && temperature_decay <= 1.0)) fail("temperature decay must lie in (0, 1]");
  if (!(init_connection_probability > 0.0 && init_connection_probability <= 1.0))
    fail("connection probability must lie in (0, 1]");
  if (!(input_interval.lo > 0.0 && input_interval.lo < input_interval.hi))
    fail("input interval must be strictly positive with lo < hi");
  if (!(output_interval.lo < output_interval.hi)) fail("output interval must satisfy lo < hi");
}

// ---------------------------------------------------------------------------
// Initialization

HiddenNode random_node(const EAConfig& config, BasisKind basis, Rng& rng) {
  HiddenNode node;
  auto draw_weight = [&] {
    double w = 0.0;
    while (w == 0.0) w = rng.uniform(config.input_hidden.lo, config.input_hidden.hi);
    return w;
  };
  for (std::size_t i = 0; i < kNumInputs; ++i)
    if (rng.bernoulli(config.init_connection_probability)) node.weights[i] = draw_weight();
  if (node.weights.empty()) node.weights[rng.index(kNumInputs)] = draw_weight();
  if (basis == BasisKind::SigmoidUnit) node.bias = rng.uniform(config.input_hidden.lo, config.input_hidden.hi);
  for (auto& b : node.output_coeffs) {
    b = 0.0;
    while (b == 0.0) b = rng.uniform(config.hidden_output.lo, config.hidden_output.hi);
  }
  return node;
}

namespace {

OutputVector random_output_bias(const EAConfig& config, Rng& rng) {
  OutputVector bias;
  for (auto& b : bias) b = rng.uniform(config.hidden_output.lo, config.hidden_output.hi);
  return bias;
}

}  // namespace

Population init_population(const EAConfig& config, const NormalizationSpec& normalization, BasisKind basis,
                           Rng& rng) {
  config.validate();
  Population pop;
  pop.reserve(config.population_size);
  for (std::size_t s = 0; s < config.population_size; ++s) {
    const int m = rng.uniform_int(config.min_init_nodes, config.max_init_nodes);
    std::vector<HiddenNode> hidden;
    for (int j = 0; j < m; ++j) hidden.push_back(random_node(config, basis, rng));
    pop.emplace_back(basis, std::move(hidden), random_output_bias(config, rng), normalization);
  }
  return pop;
}

// ---------------------------------------------------------------------------
// Fitness

TrainingSet::TrainingSet(const Dataset& data, const NormalizationSpec& spec)
    : n_(data.size()), x_(n_ * kNumInputs), log_x_(n_ * kNumInputs), y_(n_ * kNumOutputs) {
  positive_.fill(true);
  for (std::size_t r = 0; r < n_; ++r) {
    const auto z = spec.normalize_inputs(data[r].inputs);
    const auto t = spec.normalize_outputs(data[r].outputs);
    for (std::size_t i = 0; i < kNumInputs; ++i) {
      x_[r * kNumInputs + i] = z[i];
      if (z[i] > 0.0)
        log_x_[r * kNumInputs + i] = std::log(z[i]);
      else
        positive_[i] = false;
    }
    std::copy(t.begin(), t.end(), y_.begin() + static_cast<std::ptrdiff_t>(r * kNumOutputs));
  }
}

std::vector<double> TrainingSet::basis_values(const NetworkModel& model) const {
  struct Term {
    std::size_t index;
    double weight;
  };
  const auto& hidden = model.hidden();
  const std::size_t m = hidden.size();
  const bool product = model.basis() == BasisKind::ProductUnit;
  std::vector<std::vector<Term>> terms(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& [i, w] : hidden[j].weights) {
      if (product && !positive_[i])
        throw DomainError("hidden node " + std::to_string(j + 1) + ": input " +
                          FeatureSchema::standard().describe_input(i) + " is not strictly positive");
      terms[j].push_back({i, w});
    }
  }
  const auto& src = product ? log_x_ : x_;
  std::vector<double> values(n_ * m);
  for (std::size_t r = 0; r < n_; ++r) {
    const double* row = src.data() + r * kNumInputs;
    for (std::size_t j = 0; j < m; ++j) {
      double net = hidden[j].bias.value_or(0.0);
      for (const auto& t : terms[j]) net += t.weight * row[t.index];
      double b;
      if (product) {
        b = std::exp(net);
      } else if (net >= 0.0) {
        b = 1.0 / (1.0 + std::exp(-net));
      } else {
        const double e = std::exp(net);
        b = e / (1.0 + e);
      }
      if (!std::isfinite(b)) throw NumericError("hidden node " + std::to_string(j + 1) + " overflowed");
      values[r * m + j] = b;
    }
  }
  return values;
}

double TrainingSet::normalized_mse(const NetworkModel& model) const {
  const auto& hidden = model.hidden();
  const std::size_t m = hidden.size();
  const auto values = basis_values(model);
  const auto& bias = model.output_bias();
  OutputVector sse{};
  for (std::size_t r = 0; r < n_; ++r) {
    OutputVector y = bias;
    for (std::size_t j = 0; j < m; ++j) {
      const double b = values[r * m + j];
      const auto& beta = hidden[j].output_coeffs;
      for (std::size_t k = 0; k < kNumOutputs; ++k) y[k] += beta[k] * b;
    }
    const double* target = y_.data() + r * kNumOutputs;
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      const double e = target[k] - y[k];
      sse[k] += e * e;
    }
  }
  double total = 0.0;
  for (double s : sse) total += s / static_cast<double>(n_);
  if (!std::isfinite(total)) throw NumericError("non-finite training error");
  return total;
}

NetworkModel TrainingSet::refit_output_layer(const NetworkModel& model) const {
  const std::size_t m = model.hidden_count();
  const auto values = basis_values(model);
  const auto cols = static_cast<Eigen::Index>(m + 1);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n_), cols);
  Eigen::MatrixXd target(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(kNumOutputs));
  for (std::size_t r = 0; r < n_; ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    design(row, 0) = 1.0;
    for (std::size_t j = 0; j < m; ++j) design(row, static_cast<Eigen::Index>(j + 1)) = values[r * m + j];
    for (std::size_t k = 0; k < kNumOutputs; ++k) target(row, static_cast<Eigen::Index>(k)) = y_[r * kNumOutputs + k];
  }
  const Eigen::MatrixXd coeffs = design.colPivHouseholderQr().solve(target);
  if (!coeffs.allFinite()) return model;

  auto hidden = model.hidden();
  OutputVector bias;
  for (std::size_t k = 0; k < kNumOutputs; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    bias[k] = coeffs(0, col);
    for (std::size_t j = 0; j < m; ++j) {
      hidden[j].output_coeffs[k] = coeffs(static_cast<Eigen::Index>(j + 1), col);
    }
  }
  return NetworkModel(model.basis(), std::move(hidden), bias, model.normalization());
}

double fitness(const NetworkModel& model, const TrainingSet& train) noexcept {
  try {
    return 1.0 / (1.0 + train.normalized_mse(model));
  } catch (...) {
    return 0.0;
  }
}

double fitness(const NetworkModel& model, const Dataset& train) {
  return fitness(model, TrainingSet(train, model.normalization()));
}

// ---------------------------------------------------------------------------
// Mutation

NetworkModel parametric_mutation(const NetworkModel& model, const EAConfig& config, Temperatures temps, Rng& rng) {
  const double sd_hidden = temps.hidden * config.input_hidden.width();
  const double sd_output = temps.output * config.hidden_output.width();
  auto perturb = [&rng](double v, double sd) {
    for (int attempt = 0; attempt < 2; ++attempt) {
      const double candidate = v + rng.normal(0.0, sd);
      if (std::isfinite(candidate) && candidate != 0.0) return candidate;
    }
    return v;
  };
  auto hidden = model.hidden();
  for (auto& node : hidden) {
    for (auto& [i, w] : node.weights) w = perturb(w, sd_hidden);
    if (node.bias) node.bias = perturb(*node.bias, sd_hidden);
    for (auto& b : node.output_coeffs)
      if (b != 0.0) b = perturb(b, sd_output);
  }
  auto bias = model.output_bias();
  for (auto& b : bias) b = perturb(b, sd_output);
  return NetworkModel(model.basis(), std::move(hidden), bias, model.normalization());
}

std::string_view to_string(StructuralOp op) noexcept {
  switch (op) {
    case StructuralOp::AddNodes: return "add-nodes";
    case StructuralOp::DeleteNodes: return "delete-nodes";
    case StructuralOp::AddConnection: return "add-connection";
    case StructuralOp::DeleteConnection: return "delete-connection";
  }
  return "?";
}

StructuralOutcome apply_structural(const NetworkModel& model, StructuralOp op, const EAConfig& config, Rng& rng) {
  auto unchanged = [&] { return StructuralOutcome{model, op, false}; };
  auto hidden = model.hidden();
  const int m = static_cast<int>(hidden.size());
  auto rebuild = [&] {
    return StructuralOutcome{NetworkModel(model.basis(), std::move(hidden), model.output_bias(), model.normalization()),
                             op, true};
  };

  switch (op) {
    case StructuralOp::AddNodes: {
      const int count = std::min(rng.uniform_int(config.nodes_add_delete_min, config.nodes_add_delete_max),
                                 config.max_nodes - m);
      if (count <= 0) return unchanged();
      for (int c = 0; c < count; ++c) hidden.push_back(random_node(config, model.basis(), rng));
      return rebuild();
    }
    case StructuralOp::DeleteNodes: {
      const int count = std::min(rng.uniform_int(config.nodes_add_delete_min, config.nodes_add_delete_max), m - 1);
      if (count <= 0) return unchanged();
      for (int c = 0; c < count; ++c) hidden.erase(hidden.begin() + static_cast<std::ptrdiff_t>(rng.index(hidden.size())));
      return rebuild();
    }
    case StructuralOp::AddConnection: {
      std::vector<std::size_t> open;
      for (std::size_t j = 0; j < hidden.size(); ++j)
        if (hidden[j].weights.size() < kNumInputs) open.push_back(j);
      if (open.empty()) return unchanged();
      auto& node = hidden[open[rng.index(open.size())]];
      std::vector<std::size_t> free_inputs;
      for (std::size_t i = 0; i < kNumInputs; ++i)
        if (!node.weights.contains(i)) free_inputs.push_back(i);
      double w = 0.0;
      const auto input = free_inputs[rng.index(free_inputs.size())];
      while (w == 0.0) w = rng.uniform(config.input_hidden.lo, config.input_hidden.hi);
      node.weights[input] = w;
      return rebuild();
    }
    case StructuralOp::DeleteConnection: {
      const auto j = rng.index(hidden.size());
      auto& node = hidden[j];
      if (node.weights.size() == 1) {
        if (m == 1) return unchanged();
        hidden.erase(hidden.begin() + static_cast<std::ptrdiff_t>(j));
        return rebuild();
      }
      auto it = node.weights.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.index(node.weights.size())));
      node.weights.erase(it);
      return rebuild();
    }
  }
  return unchanged();
}

StructuralOutcome structural_mutation(const NetworkModel& model, const EAConfig& config, Rng& rng) {
  const auto op = static_cast<StructuralOp>(rng.uniform_int(0, 3));
  return apply_structural(model, op, config, rng);
}

// ---------------------------------------------------------------------------
// Generational loop

namespace {

void evaluate_all(Population& pop, std::vector<double>& fit, std::vector<double>& err, std::size_t first,
                  const TrainingSet& train, bool refit, unsigned threads) {
  auto work = [&](std::size_t s) {
    try {
      if (refit) pop[s] = train.refit_output_layer(pop[s]);
      err[s] = train.normalized_mse(pop[s]);
      fit[s] = 1.0 / (1.0 + err[s]);
    } catch (...) {
      err[s] = std::numeric_limits<double>::infinity();
      fit[s] = 0.0;
    }
  };
  const std::size_t count = pop.size() - first;
  if (threads <= 1 || count < 2) {
    for (std::size_t s = first; s < pop.size(); ++s) work(s);
    return;
  }
  std::atomic<std::size_t> next{first};
  std::vector<std::jthread> workers;
  const auto n_workers = std::min<std::size_t>(threads, count);
  workers.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t)
    workers.emplace_back([&] {
      for (std::size_t s = next++; s < pop.size(); s = next++) work(s);
    });
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::size_t> rank_order(const std::vector<double>& fit) {
  std::vector<std::size_t> order(fit.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
  return order;
}

std::size_t slots(std::size_t pop, double fraction) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(pop) * fraction));
}

}  // namespace

EvolveResult evolve(const Dataset& train, const EAConfig& config, BasisKind basis) {
  config.validate();
  if (train.empty()) throw ValidationError("training set is empty");
  const auto started = std::chrono::steady_clock::now();
  const auto spec = fit_normalizer(train, config.input_interval, config.output_interval);
  const TrainingSet set(train, spec);
  const unsigned threads = resolve_threads(config.threads);

  Rng rng(config.seed);
  Population pop = init_population(config, spec, basis, rng);
  const std::size_t n = pop.size();
  std::vector<double> fit(n), err(n);
  evaluate_all(pop, fit, err, 0, set, config.refit_output_layer, threads);

  const std::size_t n_elite = std::max<std::size_t>(1, std::min(n, slots(n, config.elite_fraction)));
  const std::size_t n_param = std::min(n - n_elite, slots(n, config.parametric_fraction));
  const std::size_t half = std::max<std::size_t>(1, n / 2);

  RunHistory history;
  auto order = rank_order(fit);
  history.generations.push_back({0, fit[order[0]], err[order[0]]});
  Temperatures temps{config.initial_temperature_hidden, config.initial_temperature_output};
  double best_so_far = fit[order[0]];

  // Rank-proportional weights over the top half: rank r gets weight (half - r).
  std::vector<double> cumulative(half);
  for (std::size_t r = 0; r < half; ++r) cumulative[r] = (r ? cumulative[r - 1] : 0.0) + static_cast<double>(half - r);

  for (int g = 1; g <= config.generations; ++g) {
    if (config.time_budget_seconds) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      if (elapsed.count() > *config.time_budget_seconds) {
        history.stopped_by_budget = true;
        break;
      }
    }
    Population next;
    next.reserve(n);
    std::vector<double> next_fit(n), next_err(n);
    for (std::size_t e = 0; e < n_elite; ++e) {
      next.push_back(pop[order[e]]);
      next_fit[e] = fit[order[e]];
      next_err[e] = err[order[e]];
    }
    for (std::size_t p = 0; p < n_param; ++p)
      next.push_back(parametric_mutation(pop[order[p % n_elite]], config, temps, rng));
    while (next.size() < n) {
      const double u = rng.uniform(0.0, cumulative.back());
      const auto r = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      auto outcome = structural_mutation(pop[order[std::min(r, half - 1)]], config, rng);
      if (!outcome.applied) ++history.structural_skips;
      next.push_back(std::move(outcome.model));
    }
    pop = std::move(next);
    fit = std::move(next_fit);
    err = std::move(next_err);
    evaluate_all(pop, fit, err, n_elite, set, config.refit_output_layer, threads);

    order = rank_order(fit);
    const double best = fit[order[0]];
    if (!(best > best_so_far)) {
      temps.hidden = std::max(config.temperature_floor, temps.hidden * config.temperature_decay);
      temps.output = std::max(config.temperature_floor, temps.output * config.temperature_decay);
    }
    best_so_far = std::max(best_so_far, best);
    history.generations.push_back({g, best, err[order[0]]});
  }

  history.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return EvolveResult{pop[order[0]], std::move(history)};
}

std::string format_history(const RunHistory& history) {
  std::string out = "generation,best_fitness,best_mse\n";
  for (const auto& g : history.generations) {
    out += std::to_string(g.generation);
    out += ',';
    out += text::format_double(g.best_fitness);
    out += ',';
    out += text::format_double(g.best_mse);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multi-run experiments

namespace {

MetricReport report_on(const NetworkModel& model, const Dataset& data) {
  std::vector<OutputVector> preds;
  preds.reserve(data.size());
  for (const auto& p : data) preds.push_back(predict(model, p.inputs));
  const auto targets = data.outputs();
  return evaluate(preds, targets);
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

}  // namespace

AggregateResult run_experiment(const Dataset& train, const Dataset& test, const EAConfig& config, BasisKind basis) {
  config.validate();
  if (test.empty()) throw ValidationError("test set is empty");

  // Every run fits the same normalizer on `train`. A product unit cannot be
  // evaluated below that fitted minimum once the normalized value reaches
  // zero, so test inputs under the training minimum are raised to it.
  std::size_t clamped = 0;
  Dataset scored_test = test;
  if (basis == BasisKind::ProductUnit) {
    const auto spec = fit_normalizer(train, config.input_interval, config.output_interval);
    std::vector<Pattern> patterns(test.begin(), test.end());
    for (auto& p : patterns)
      for (std::size_t i = 0; i < kNumInputs; ++i)
        if (p.inputs[i] < spec.input(i).src_min) {
          p.inputs[i] = spec.input(i).src_min;
          ++clamped;
        }
    scored_test = Dataset(std::move(patterns), test.provenance(), test.has_outputs());
  }

  std::vector<RunSummary> runs;
  std::optional<NetworkModel> best_model;
  RunHistory best_history;
  std::size_t best_run = 0;
  for (int r = 0; r < config.runs; ++r) {
    auto cfg = config;
    cfg.seed = config.seed + static_cast<std::uint64_t>(r);
    auto result = evolve(train, cfg, basis);
    RunSummary s{cfg.seed, report_on(result.best, train), report_on(result.best, scored_test),
                 result.history.generations.back().best_mse, count_links(result.best)};
    if (!best_model || s.train_normalized_mse < runs[best_run].train_normalized_mse) {
      best_run = runs.size();
      best_model = result.best;
      best_history = result.history;
    }
    runs.push_back(s);
  }

  auto column = [&](auto&& get) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& s : runs) v.push_back(get(s));
    return moments(v);
  };
  MetricRow mean{"Mean", {}, 0.0, {}, 0.0, std::nullopt};
  MetricRow sd{"SD", {}, 0.0, {}, 0.0, std::nullopt};
  auto fill = [&](double MetricRow::*field, auto&& get) {
    const auto m = column(get);
    mean.*field = m.mean;
    sd.*field = m.sd;
  };
  fill(&MetricRow::global_mse, [](const RunSummary& s) { return s.test.global_mse; });
  fill(&MetricRow::global_sep, [](const RunSummary& s) { return s.test.global_sep; });
  for (std::size_t k = 0; k < kNumOutputs; ++k) {
    const auto e = column([k](const RunSummary& s) { return s.test.mse[k]; });
    const auto p = column([k](const RunSummary& s) { return s.test.sep[k]; });
    mean.mse[k] = e.mean;
    sd.mse[k] = e.sd;
    mean.sep[k] = p.mean;
    sd.sep[k] = p.sd;
  }
  const auto links = column([](const RunSummary& s) { return static_cast<double>(s.links); });
  mean.links = links.mean;
  sd.links = links.sd;
  auto best = to_row("Best", runs[best_run].test, static_cast<double>(runs[best_run].links));

  return AggregateResult{std::move(runs), mean, sd, best, best_run, *best_model, std::move(best_history), clamped};
}

std::string render_aggregate(const AggregateResult& result, std::string_view title) {
  const std::array<MetricRow, 3> rows{result.mean, result.sd, result.best};
  return render_metric_table(title, rows);
}

}  // namespace punn
