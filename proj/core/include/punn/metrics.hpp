#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "punn/schema.hpp"

namespace punn {

/// Per-output values and their sum. The published tables report the sum of
/// the four per-output figures as the global figure; divide by four for the
/// output-averaged value.
struct OutputMetric {
  OutputVector per_output{};
  double global = 0.0;
};

/// Mean squared error per output over n patterns.
OutputMetric mse(std::span<const OutputVector> preds, std::span<const OutputVector> targets);

/// Standard error of prediction per output, in percent:
/// 100 / |mean_q| * sqrt(mean squared error_q).
OutputMetric sep(std::span<const OutputVector> preds, std::span<const OutputVector> targets,
                 const OutputVector& ref_means);

struct MetricReport {
  OutputVector mse{};
  double global_mse = 0.0;
  OutputVector sep{};
  double global_sep = 0.0;
  std::size_t n = 0;
};

/// MSE and SEP together; SEP uses the target means of the evaluated set.
MetricReport evaluate(std::span<const OutputVector> preds, std::span<const OutputVector> targets);

/// A table row in the MSE | SEP | #Links layout. Rows may hold aggregates
/// (means, standard deviations) so the global column is not re-derived.
struct MetricRow {
  std::string label;
  OutputVector mse{};
  double global_mse = 0.0;
  OutputVector sep{};
  double global_sep = 0.0;
  std::optional<double> links;
};

MetricRow to_row(std::string label, const MetricReport& report, std::optional<double> links = std::nullopt);

/// Columns: label, MSE Global/LAEQ/L/R/SA, SEP Global/LAEQ/L/R/SA, #Links.
std::string render_metric_table(std::string_view title, std::span<const MetricRow> rows);

}  // namespace punn
