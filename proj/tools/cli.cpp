#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "punn/analysis.hpp"
#include "punn/baselines.hpp"
#include "punn/dataset.hpp"
#include "punn/error.hpp"
#include "punn/evolution.hpp"
#include "punn/metrics.hpp"
#include "punn/model_io.hpp"
#include "punn/synth.hpp"
#include "punn/text.hpp"

#ifndef PUNNCTL_VERSION
#define PUNNCTL_VERSION "dev"
#endif

namespace punnctl {
namespace {

using namespace punn;

constexpr const char* kSeedEnv = "PUNN_SEED";

struct Context {
  std::string command_line;
  std::ostream& out;
  std::ostream& err;
};

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (!env || !*env) return 1;
  std::uint64_t seed = 0;
  const std::string_view v(env);
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ArgumentError(std::string(kSeedEnv) + " must be a non-negative integer, got '" + env + "'");
  return seed;
}

std::vector<std::string> provenance(const Context& ctx, std::optional<std::uint64_t> seed) {
  return {std::string("punnctl ") + PUNNCTL_VERSION, "command: " + ctx.command_line,
          "seed: " + (seed ? std::to_string(*seed) : std::string("none"))};
}

std::string comment_block(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += "# " + l + '\n';
  return s;
}

using Settings = std::vector<std::pair<std::string, std::string>>;

void echo_config(const Context& ctx, const Settings& settings) {
  ctx.out << "# resolved configuration\n";
  for (const auto& [k, v] : settings) ctx.out << k << '=' << v << '\n';
}

std::string fmt(double v) { return text::format_double(v); }

std::string join_doubles(std::span<const double> values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + fmt(values[i]);
  return s;
}

LoadOptions load_options(const Context& ctx, const std::string& range_check, bool require_outputs = true) {
  LoadOptions o;
  o.require_outputs = require_outputs;
  if (range_check == "off")
    o.range_check = RangeCheck::Off;
  else if (range_check == "fail")
    o.range_check = RangeCheck::Fail;
  else
    o.range_check = RangeCheck::Warn;
  o.on_warning = [&err = ctx.err](std::string_view msg) { err << "warning: " << msg << '\n'; };
  return o;
}

NetworkModel resolve_model(const std::string& spec) {
  if (spec == "reference") return reference_punn();
  return load_model(spec);
}

std::size_t resolve_input(const std::string& name) {
  auto i = FeatureSchema::standard().find_input(text::trim(name));
  if (!i) throw ArgumentError("unknown input variable '" + name + "'");
  return *i;
}

std::vector<OutputVector> predictions(const NetworkModel& model, const Dataset& data) {
  std::vector<OutputVector> preds;
  preds.reserve(data.size());
  for (const auto& p : data) preds.push_back(predict(model, p.inputs));
  return preds;
}

template <typename Predict>
MetricReport evaluate_on(const Dataset& data, Predict&& f) {
  std::vector<OutputVector> preds;
  preds.reserve(data.size());
  for (const auto& p : data) preds.push_back(f(p.inputs));
  const auto targets = data.outputs();
  return evaluate(preds, targets);
}

// ---- gen -------------------------------------------------------------------

struct GenOptions {
  std::uint64_t seed = 1;
  std::string out;
  double noise = synth::kDefaultNoiseFraction;
  std::vector<double> noise_sd;
  std::size_t patterns = 0;
  std::string label_model;
  std::string header = "alias";
};

int cmd_gen(const Context& ctx, const GenOptions& o) {
  synth::SynthConfig cfg;
  cfg.seed = o.seed;
  cfg.noise_fraction = o.noise;
  cfg.max_patterns = o.patterns;
  if (!o.noise_sd.empty()) {
    if (o.noise_sd.size() != kNumOutputs) throw ArgumentError("--noise-sd needs 4 values (LAEQ,L,R,SA)");
    OutputVector sd{};
    for (std::size_t k = 0; k < kNumOutputs; ++k) sd[k] = o.noise_sd[k];
    cfg.noise_sd = sd;
  }
  if (!o.label_model.empty()) cfg.label_model = load_model(o.label_model);

  echo_config(ctx, {{"seed", std::to_string(o.seed)},
                    {"out", o.out},
                    {"noise", fmt(o.noise)},
                    {"noise-sd", o.noise_sd.empty() ? "none" : join_doubles(o.noise_sd)},
                    {"patterns", std::to_string(o.patterns)},
                    {"label-model", o.label_model.empty() ? "reference" : o.label_model},
                    {"header", o.header}});

  auto data = synth::generate(cfg);
  auto lines = provenance(ctx, o.seed);
  for (const auto& l : data.provenance()) lines.push_back(l);
  data = data.with_provenance(std::move(lines));
  save_dataset(o.out, data, o.header == "positional" ? HeaderStyle::Positional : HeaderStyle::Alias);
  ctx.out << "wrote " << data.size() << " patterns to " << o.out << '\n';
  return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainOptions {
  std::uint64_t seed = 1;
  std::string data;
  std::string test;
  double train_fraction = 0.75;
  std::string basis = "punn";
  std::string mode = "simple";
  std::string preset = "table";
  int runs = 0;
  std::size_t pop = 0;
  int gens = 0;
  int max_nodes = 0;
  unsigned threads = 0;
  double time_budget = 0.0;
  bool no_refit = false;
  std::string model_out = "model.punn";
  std::string history_out = "history.csv";
  std::string report_out = "report.txt";
  std::string range_check = "warn";
};

struct TrainFlags {
  CLI::Option* runs;
  CLI::Option* pop;
  CLI::Option* gens;
  CLI::Option* max_nodes;
  CLI::Option* time_budget;
};

int cmd_train(const Context& ctx, const TrainOptions& o, const TrainFlags& flags) {
  const auto basis = parse_basis(o.basis);
  if (!basis) throw ArgumentError("unknown basis '" + o.basis + "' (punn or sunn)");
  if (o.mode != "simple" && o.mode != "complex") throw ArgumentError("--mode must be simple or complex");
  if (o.preset != "table" && o.preset != "desk") throw ArgumentError("--preset must be table or desk");

  EAConfig cfg = o.mode == "complex" ? EAConfig::complex_mode(*basis) : EAConfig::defaults(*basis);
  if (o.preset == "desk") {
    cfg.runs = 3;
    cfg.population_size = 100;
  }
  if (flags.runs->count()) cfg.runs = o.runs;
  if (flags.pop->count()) cfg.population_size = o.pop;
  if (flags.gens->count()) cfg.generations = o.gens;
  if (flags.max_nodes->count()) cfg.max_nodes = o.max_nodes;
  if (flags.time_budget->count()) cfg.time_budget_seconds = o.time_budget;
  cfg.seed = o.seed;
  cfg.threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  cfg.refit_output_layer = !o.no_refit;
  cfg.validate();

  echo_config(ctx, {{"seed", std::to_string(cfg.seed)},
                    {"data", o.data},
                    {"test", o.test.empty() ? "split" : o.test},
                    {"train-fraction", fmt(o.train_fraction)},
                    {"basis", std::string(to_string(*basis))},
                    {"mode", o.mode},
                    {"preset", o.preset},
                    {"runs", std::to_string(cfg.runs)},
                    {"pop", std::to_string(cfg.population_size)},
                    {"gens", std::to_string(cfg.generations)},
                    {"init-nodes", std::to_string(cfg.min_init_nodes) + ".." + std::to_string(cfg.max_init_nodes)},
                    {"max-nodes", std::to_string(cfg.max_nodes)},
                    {"add-delete", std::to_string(cfg.nodes_add_delete_min) + ".." +
                                       std::to_string(cfg.nodes_add_delete_max)},
                    {"input-hidden", "[" + fmt(cfg.input_hidden.lo) + "," + fmt(cfg.input_hidden.hi) + "]"},
                    {"hidden-output", "[" + fmt(cfg.hidden_output.lo) + "," + fmt(cfg.hidden_output.hi) + "]"},
                    {"refit-output-layer", cfg.refit_output_layer ? "true" : "false"},
                    {"threads", std::to_string(cfg.threads)},
                    {"time-budget", cfg.time_budget_seconds ? fmt(*cfg.time_budget_seconds) : "none"},
                    {"model-out", o.model_out},
                    {"history-out", o.history_out},
                    {"report-out", o.report_out}});

  const auto opts = load_options(ctx, o.range_check);
  const auto all = load_dataset(o.data, FeatureSchema::standard(), opts);
  TrainTest tt;
  if (o.test.empty()) {
    tt = split(all, o.train_fraction, o.seed);
  } else {
    tt.train = all;
    tt.test = load_dataset(o.test, FeatureSchema::standard(), opts);
  }
  ctx.out << "train patterns " << tt.train.size() << ", test patterns " << tt.test.size() << '\n';

  const auto result = run_experiment(tt.train, tt.test, cfg, *basis);

  std::ostringstream report;
  report << comment_block(provenance(ctx, o.seed));
  report << "run,seed,train_normalized_mse,test_global_mse,test_global_sep,links\n";
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const auto& s = result.runs[r];
    report << r + 1 << ',' << s.seed << ',' << fmt(s.train_normalized_mse) << ',' << fmt(s.test.global_mse) << ','
           << fmt(s.test.global_sep) << ',' << s.links << '\n';
  }
  report << '\n';
  const std::string title = std::string(*basis == BasisKind::ProductUnit ? "PUNN" : "SUNN") + " " + o.mode + ", " +
                            std::to_string(cfg.runs) + " runs, test set";
  report << render_aggregate(result, title);
  if (result.clamped_test_inputs)
    report << result.clamped_test_inputs << " test input values below the training minimum were clamped to it\n";
  report << "best run " << result.best_run + 1 << " (seed " << result.runs[result.best_run].seed << ")\n";

  auto header = provenance(ctx, o.seed);
  header.push_back("best run " + std::to_string(result.best_run + 1));
  save_model(o.model_out, result.best_model, header);
  text::write_file_atomic(o.history_out, comment_block(provenance(ctx, o.seed)) + format_history(result.best_history));
  text::write_file_atomic(o.report_out, report.str());

  ctx.out << report.str();
  if (result.best_history.stopped_by_budget) ctx.err << "warning: time budget reached; results are not reproducible\n";
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalOptions {
  std::string model;
  std::string data;
  std::string report_out;
  std::string range_check = "warn";
};

int cmd_eval(const Context& ctx, const EvalOptions& o) {
  echo_config(ctx, {{"model", o.model},
                    {"data", o.data},
                    {"report-out", o.report_out.empty() ? "none" : o.report_out},
                    {"range-check", o.range_check}});
  const auto model = resolve_model(o.model);
  const auto data = load_dataset(o.data, FeatureSchema::standard(), load_options(ctx, o.range_check));
  const auto report = evaluate(predictions(model, data), data.outputs());
  const std::array<MetricRow, 1> rows{to_row(o.model, report, static_cast<double>(count_links(model)))};
  const auto table = render_metric_table("Evaluation on " + std::to_string(data.size()) + " patterns", rows);
  ctx.out << table;
  if (!o.report_out.empty()) text::write_file_atomic(o.report_out, comment_block(provenance(ctx, std::nullopt)) + table);
  return kExitOk;
}

// ---- predict ---------------------------------------------------------------

struct PredictOptions {
  std::string model;
  std::string data;
  std::string out;
  std::string range_check = "warn";
};

int cmd_predict(const Context& ctx, const PredictOptions& o) {
  echo_config(ctx, {{"model", o.model}, {"data", o.data}, {"out", o.out}, {"range-check", o.range_check}});
  const auto model = resolve_model(o.model);
  const auto data = load_dataset(o.data, FeatureSchema::standard(), load_options(ctx, o.range_check, false));
  const auto& schema = FeatureSchema::standard();

  auto lines = provenance(ctx, std::nullopt);
  for (const auto& l : data.provenance()) lines.push_back("input: " + l);
  std::string csv = comment_block(lines);
  for (std::size_t i = 0; i < kNumInputs; ++i) csv += (i ? "," : "") + std::string(schema.input_alias(i));
  if (data.has_outputs())
    for (std::size_t k = 0; k < kNumOutputs; ++k) csv += "," + std::string(schema.output_name(k));
  for (std::size_t k = 0; k < kNumOutputs; ++k) csv += ",pred_" + std::string(schema.output_name(k));
  csv += '\n';
  for (const auto& p : data) {
    const auto y = predict(model, p.inputs);
    for (std::size_t i = 0; i < kNumInputs; ++i) csv += (i ? "," : "") + fmt(p.inputs[i]);
    if (data.has_outputs())
      for (double v : p.outputs) csv += "," + fmt(v);
    for (double v : y) csv += "," + fmt(v);
    csv += '\n';
  }
  text::write_file_atomic(o.out, csv);
  ctx.out << "wrote " << data.size() << " predictions to " << o.out << '\n';
  return kExitOk;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeOptions {
  std::uint64_t seed = 1;
  std::string model;
  std::string data;
  std::string fixed = "means";
  std::string influence_out;
  std::vector<std::string> surfaces;
  std::size_t grid = 50;
  bool full_range = false;
  std::string surface_dir = ".";
  std::string range_check = "warn";
};

int cmd_analyze(const Context& ctx, const AnalyzeOptions& o) {
  if (o.fixed != "means" && o.fixed != "medians") throw ArgumentError("--fixed must be means or medians");
  if (o.grid < 1) throw ArgumentError("--grid must be >= 1");
  std::string surfaces;
  for (const auto& s : o.surfaces) surfaces += (surfaces.empty() ? "" : ";") + s;
  echo_config(ctx, {{"seed", std::to_string(o.seed)},
                    {"model", o.model},
                    {"data", o.data.empty() ? "synthetic" : o.data},
                    {"fixed", o.fixed},
                    {"influence-out", o.influence_out.empty() ? "none" : o.influence_out},
                    {"surface", surfaces.empty() ? "none" : surfaces},
                    {"grid", std::to_string(o.grid)},
                    {"full-range", o.full_range ? "true" : "false"},
                    {"surface-dir", o.surface_dir}});

  const auto model = resolve_model(o.model);
  Dataset data;
  if (o.data.empty()) {
    synth::SynthConfig cfg;
    cfg.seed = o.seed;
    data = synth::generate(cfg);
  } else {
    data = load_dataset(o.data, FeatureSchema::standard(), load_options(ctx, o.range_check, false));
  }
  const auto fixed = o.fixed == "medians" ? FixedPoint::medians(data) : FixedPoint::means(data);

  const auto report = influence(model, model.normalization().normalize_inputs(fixed.values));
  const auto table = format_influence(report);
  ctx.out << "influence at " << fixed.description << ":\n" << table;

  const auto& schema = FeatureSchema::standard();
  std::vector<std::pair<std::filesystem::path, std::string>> outputs;
  if (!o.influence_out.empty())
    outputs.emplace_back(o.influence_out,
                         comment_block(provenance(ctx, o.seed)) + "# nominal: " + fixed.description + '\n' + table);
  for (const auto& spec : o.surfaces) {
    const auto parts = text::split(spec, ',');
    if (parts.size() != 2) throw ArgumentError("--surface expects two variables like X3,X5, got '" + spec + "'");
    const auto a = resolve_input(std::string(parts[0]));
    const auto b = resolve_input(std::string(parts[1]));
    auto axis = [&](std::size_t var) {
      return AxisSpec{o.grid, o.full_range ? working_ranges()[var] : default_axis_range(model, var)};
    };
    const auto s = surface(model, a, b, axis(a), axis(b), fixed);
    const auto path = std::filesystem::path(o.surface_dir) /
                      ("surface_" + std::string(schema.input_name(a)) + "_" + std::string(schema.input_name(b)) + ".csv");
    std::string head = comment_block(provenance(ctx, o.seed)) + "# fixed: " + fixed.description + '\n';
    const auto ext = extremes(s);
    ctx.out << "surface " << schema.describe_input(a) << " x " << schema.describe_input(b) << " -> " << path.string()
            << '\n';
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      const std::string line = std::string(schema.output_name(k)) + " min/diff/max " + fmt(ext[k].min) + " / " +
                               fmt(ext[k].span) + " / " + fmt(ext[k].max);
      head += "# " + line + '\n';
      ctx.out << "  " << line << '\n';
    }
    outputs.emplace_back(path, head + format_surface(s));
  }
  if (!o.surfaces.empty()) std::filesystem::create_directories(o.surface_dir);
  for (const auto& [path, contents] : outputs) text::write_file_atomic(path, contents);
  return kExitOk;
}

// ---- baseline --------------------------------------------------------------

struct BaselineOptions {
  std::uint64_t seed = 1;
  std::string data;
  std::string test;
  double train_fraction = 0.75;
  std::string kind = "all";
  std::vector<double> lambda;
  double ratio = 0.5;
  int grid = 20;
  std::string report_out;
  std::string range_check = "warn";
};

std::vector<double> geometric_grid(double hi, double lo, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(hi * std::pow(lo / hi, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)));
  return g;
}

int cmd_baseline(const Context& ctx, const BaselineOptions& o) {
  std::vector<Regularization> kinds;
  if (o.kind == "all")
    kinds = {Regularization::None, Regularization::Ridge, Regularization::Lasso, Regularization::ElasticNet};
  else if (o.kind == "linear")
    kinds = {Regularization::None};
  else if (o.kind == "ridge")
    kinds = {Regularization::Ridge};
  else if (o.kind == "lasso")
    kinds = {Regularization::Lasso};
  else if (o.kind == "elasticnet")
    kinds = {Regularization::ElasticNet};
  else
    throw ArgumentError("--kind must be all, linear, ridge, lasso or elasticnet");
  if (!(o.ratio > 0.0 && o.ratio <= 1.0)) throw ArgumentError("--ratio must lie in (0, 1]");
  if (o.grid < 1) throw ArgumentError("--grid must be >= 1");

  echo_config(ctx, {{"seed", std::to_string(o.seed)},
                    {"data", o.data},
                    {"test", o.test.empty() ? "split" : o.test},
                    {"train-fraction", fmt(o.train_fraction)},
                    {"kind", o.kind},
                    {"lambda", o.lambda.empty() ? "cv" : join_doubles(o.lambda)},
                    {"ratio", fmt(o.ratio)},
                    {"grid", std::to_string(o.grid)},
                    {"report-out", o.report_out.empty() ? "none" : o.report_out}});

  const auto opts = load_options(ctx, o.range_check);
  const auto all = load_dataset(o.data, FeatureSchema::standard(), opts);
  TrainTest tt;
  if (o.test.empty()) {
    tt = split(all, o.train_fraction, o.seed);
  } else {
    tt.train = all;
    tt.test = load_dataset(o.test, FeatureSchema::standard(), opts);
  }

  double lasso_max = 0.0;
  for (std::size_t k = 0; k < kNumOutputs; ++k) lasso_max = std::max(lasso_max, lasso_critical_lambda(tt.train, k));

  std::vector<MetricRow> rows;
  std::vector<std::string> notes;
  for (auto kind : kinds) {
    LinearModel m;
    double lambda = 0.0;
    if (kind != Regularization::None) {
      if (!o.lambda.empty()) {
        lambda = o.lambda.size() == 1 ? o.lambda[0] : select_lambda(tt.train, kind, o.lambda, o.seed, o.ratio);
      } else {
        std::vector<double> grid;
        if (kind == Regularization::Ridge)
          grid = geometric_grid(1e6, 1e-4, o.grid);
        else
          grid = geometric_grid(std::max(lasso_max, 1e-12) / (kind == Regularization::ElasticNet ? o.ratio : 1.0),
                                std::max(lasso_max, 1e-12) * 1e-4, o.grid);
        lambda = select_lambda(tt.train, kind, grid, o.seed, o.ratio);
      }
    }
    switch (kind) {
      case Regularization::None:
        m = fit_linear(tt.train, {.rank_fallback = true, .on_warning = opts.on_warning});
        break;
      case Regularization::Ridge:
        m = fit_ridge(tt.train, lambda);
        break;
      case Regularization::Lasso:
        m = fit_lasso(tt.train, lambda);
        break;
      case Regularization::ElasticNet:
        m = fit_elastic_net(tt.train, lambda, o.ratio);
        break;
    }
    const auto report = evaluate_on(tt.test, [&](const InputVector& x) { return m.predict(x); });
    rows.push_back(to_row(std::string(to_string(kind)), report, static_cast<double>(count_links(m))));
    std::string note = std::string(to_string(kind)) + ": lambda " + fmt(m.lambda);
    if (kind == Regularization::ElasticNet) note += ", l1 ratio " + fmt(m.ratio);
    if (!m.converged) note += ", not converged after " + std::to_string(m.sweeps) + " sweeps";
    notes.push_back(note);
  }

  const auto table = render_metric_table("Linear baselines, " + std::to_string(tt.test.size()) + " test patterns", rows);
  ctx.out << table;
  for (const auto& n : notes) ctx.out << n << '\n';
  if (!o.report_out.empty()) {
    auto lines = provenance(ctx, o.seed);
    lines.insert(lines.end(), notes.begin(), notes.end());
    text::write_file_atomic(o.report_out, comment_block(lines) + table);
  }
  return kExitOk;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s = "punnctl";
  for (const auto& a : args) s += " " + a;
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Context ctx{join_args(args), out, err};

  CLI::App app{"Multitask product-unit / sigmoid-unit network toolkit for motor acoustic-quality prediction",
               "punnctl"};
  app.footer(
      "Settings precedence: command-line flags, then the --config file, then built-in defaults.\n"
      "Config files hold key=value lines (long option names without dashes) under [gen], [train], ...\n"
      "The default seed is read from PUNN_SEED when set.\n"
      "Exit status: 0 success, 2 usage error, 3 data error, 4 numeric error.");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value settings file with one [subcommand] section per command");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_version_flag("--version", std::string("punnctl ") + PUNNCTL_VERSION);

  std::uint64_t seed_default = 1;
  try {
    seed_default = default_seed();
  } catch (const Error& e) {
    err << "punnctl: " << e.what() << '\n';
    return kExitUsage;
  }

  GenOptions gen_o;
  gen_o.seed = seed_default;
  auto* gen = app.add_subcommand("gen", "Generate a labeled synthetic dataset over the experimental design");
  gen->add_option("--out", gen_o.out, "Output CSV path")->required();
  gen->add_option("--seed", gen_o.seed, "Feature jitter / noise / subsampling seed")->capture_default_str();
  gen->add_option("--noise", gen_o.noise, "Noise SD as a fraction of each output's label range")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--noise-sd", gen_o.noise_sd, "Explicit noise SDs LAEQ,L,R,SA (native units)")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--patterns", gen_o.patterns, "Keep a seeded subset of this many patterns (0 = all 3712)")
      ->capture_default_str();
  gen->add_option("--label-model", gen_o.label_model, "Label with this model file instead of the reference PUNN");
  gen->add_option("--header", gen_o.header, "Column names")
      ->check(CLI::IsMember({"alias", "positional"}))
      ->capture_default_str();

  TrainOptions train_o;
  train_o.seed = seed_default;
  auto* train = app.add_subcommand("train", "Evolve PUNN or SUNN models and report test-set statistics");
  train->add_option("--data", train_o.data, "Dataset CSV (split into train/test unless --test is given)")->required();
  train->add_option("--test", train_o.test, "Separate test CSV");
  train->add_option("--train-fraction", train_o.train_fraction, "Training share of the split")->capture_default_str();
  train->add_option("--basis", train_o.basis, "punn or sunn")->capture_default_str();
  train->add_option("--mode", train_o.mode, "simple (200 generations) or complex (6000)")
      ->check(CLI::IsMember({"simple", "complex"}))
      ->capture_default_str();
  train->add_option("--preset", train_o.preset, "table (30 runs, pop 1000) or desk (3 runs, pop 100)")
      ->check(CLI::IsMember({"table", "desk"}))
      ->capture_default_str();
  TrainFlags flags{};
  flags.runs = train->add_option("--runs", train_o.runs, "Independent runs")->check(CLI::PositiveNumber);
  flags.pop = train->add_option("--pop", train_o.pop, "Population size")->check(CLI::PositiveNumber);
  flags.gens = train->add_option("--gens", train_o.gens, "Generations per run")->check(CLI::NonNegativeNumber);
  flags.max_nodes = train->add_option("--max-nodes", train_o.max_nodes, "Hidden node cap")->check(CLI::PositiveNumber);
  flags.time_budget =
      train->add_option("--time-budget", train_o.time_budget, "Wall-clock cap per run in seconds (breaks reproducibility)")
          ->check(CLI::PositiveNumber);
  train->add_option("--seed", train_o.seed, "Seed of the first run and of the train/test split")->capture_default_str();
  train->add_option("--threads", train_o.threads, "Fitness evaluation threads (0 = all cores)")->capture_default_str();
  train->add_flag("--no-refit", train_o.no_refit, "Evolve output weights by mutation instead of least squares");
  train->add_option("--model-out", train_o.model_out, "Best model file")->capture_default_str();
  train->add_option("--history-out", train_o.history_out, "Best run's per-generation history")->capture_default_str();
  train->add_option("--report-out", train_o.report_out, "Aggregate report")->capture_default_str();
  train->add_option("--range-check", train_o.range_check, "off, warn or fail")
      ->check(CLI::IsMember({"off", "warn", "fail"}))
      ->capture_default_str();

  EvalOptions eval_o;
  auto* eval = app.add_subcommand("eval", "Report MSE and SEP of a model on a labeled dataset");
  eval->add_option("--model", eval_o.model, "Model file, or 'reference'")->required();
  eval->add_option("--data", eval_o.data, "Labeled dataset CSV")->required();
  eval->add_option("--report-out", eval_o.report_out, "Also write the table here");
  eval->add_option("--range-check", eval_o.range_check, "off, warn or fail")
      ->check(CLI::IsMember({"off", "warn", "fail"}))
      ->capture_default_str();

  PredictOptions pred_o;
  auto* pred = app.add_subcommand("predict", "Append the four predicted outputs to every input row");
  pred->add_option("--model", pred_o.model, "Model file, or 'reference'")->required();
  pred->add_option("--data", pred_o.data, "Input CSV (output columns optional)")->required();
  pred->add_option("--out", pred_o.out, "Output CSV path")->required();
  pred->add_option("--range-check", pred_o.range_check, "off, warn or fail")
      ->check(CLI::IsMember({"off", "warn", "fail"}))
      ->capture_default_str();

  AnalyzeOptions an_o;
  an_o.seed = seed_default;
  auto* an = app.add_subcommand("analyze", "Input influence slopes and two-variable response surfaces");
  an->add_option("--model", an_o.model, "Model file, or 'reference'")->required();
  an->add_option("--data", an_o.data, "Dataset supplying the fixed values (default: synthetic design)");
  an->add_option("--seed", an_o.seed, "Seed of the synthetic design when --data is absent")->capture_default_str();
  an->add_option("--fixed", an_o.fixed, "Fixed values of unswept inputs: means or medians")
      ->check(CLI::IsMember({"means", "medians"}))
      ->capture_default_str();
  an->add_option("--influence-out", an_o.influence_out, "Write the influence table here");
  an->add_option("--surface", an_o.surfaces, "Variable pair to sweep, e.g. X3,X5 or p,V50 (repeatable)");
  an->add_option("--grid", an_o.grid, "Points per surface axis")->capture_default_str();
  an->add_flag("--full-range", an_o.full_range, "Sweep the full working range instead of the fitted range");
  an->add_option("--surface-dir", an_o.surface_dir, "Directory for surface CSV files")->capture_default_str();
  an->add_option("--range-check", an_o.range_check, "off, warn or fail")
      ->check(CLI::IsMember({"off", "warn", "fail"}))
      ->capture_default_str();

  BaselineOptions base_o;
  base_o.seed = seed_default;
  auto* base = app.add_subcommand("baseline", "Fit linear, ridge, lasso and elastic-net baselines");
  base->add_option("--data", base_o.data, "Dataset CSV (split into train/test unless --test is given)")->required();
  base->add_option("--test", base_o.test, "Separate test CSV");
  base->add_option("--train-fraction", base_o.train_fraction, "Training share of the split")->capture_default_str();
  base->add_option("--seed", base_o.seed, "Split and cross-validation seed")->capture_default_str();
  base->add_option("--kind", base_o.kind, "all, linear, ridge, lasso or elasticnet")
      ->check(CLI::IsMember({"all", "linear", "ridge", "lasso", "elasticnet"}))
      ->capture_default_str();
  base->add_option("--lambda", base_o.lambda, "Penalty; several values are cross-validated (default: automatic grid)")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  base->add_option("--ratio", base_o.ratio, "Elastic-net L1 share")->capture_default_str();
  base->add_option("--grid", base_o.grid, "Size of the automatic lambda grid")->capture_default_str();
  base->add_option("--report-out", base_o.report_out, "Also write the table here");
  base->add_option("--range-check", base_o.range_check, "off, warn or fail")
      ->check(CLI::IsMember({"off", "warn", "fail"}))
      ->capture_default_str();

  std::vector<const char*> argv{"punnctl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "punnctl: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(ctx, gen_o);
    if (train->parsed()) return cmd_train(ctx, train_o, flags);
    if (eval->parsed()) return cmd_eval(ctx, eval_o);
    if (pred->parsed()) return cmd_predict(ctx, pred_o);
    if (an->parsed()) return cmd_analyze(ctx, an_o);
    if (base->parsed()) return cmd_baseline(ctx, base_o);
  } catch (const ArgumentError& e) {
    err << "punnctl: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "punnctl: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericError& e) {
    err << "punnctl: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "punnctl: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace punnctl
