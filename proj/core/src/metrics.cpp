#include "punn/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "punn/error.hpp"

namespace punn {

namespace {

void check_shapes(std::span<const OutputVector> preds, std::span<const OutputVector> targets) {
  if (preds.size() != targets.size())
    throw ArgumentError("prediction/target row counts differ (" + std::to_string(preds.size()) + " vs " +
                        std::to_string(targets.size()) + ")");
  if (preds.empty()) throw ArgumentError("metrics need at least one pattern");
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t k = 0; k < kNumOutputs; ++k)
      if (!std::isfinite(preds[i][k]) || !std::isfinite(targets[i][k]))
        throw ValidationError("non-finite value at pattern " + std::to_string(i + 1));
}

OutputVector squared_error_means(std::span<const OutputVector> preds, std::span<const OutputVector> targets) {
  OutputVector sum{};
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t k = 0; k < kNumOutputs; ++k) {
      const double e = targets[i][k] - preds[i][k];
      sum[k] += e * e;
    }
  for (auto& s : sum) s /= static_cast<double>(preds.size());
  return sum;
}

double total(const OutputVector& v) { return v[0] + v[1] + v[2] + v[3]; }

}  // namespace

OutputMetric mse(std::span<const OutputVector> preds, std::span<const OutputVector> targets) {
  check_shapes(preds, targets);
  OutputMetric m{squared_error_means(preds, targets), 0.0};
  m.global = total(m.per_output);
  return m;
}

OutputMetric sep(std::span<const OutputVector> preds, std::span<const OutputVector> targets,
                 const OutputVector& ref_means) {
  check_shapes(preds, targets);
  for (std::size_t k = 0; k < kNumOutputs; ++k)
    if (!(std::abs(ref_means[k]) > 0.0) || !std::isfinite(ref_means[k]))
      throw ArgumentError("SEP reference mean of output " + std::to_string(k + 1) + " must be finite and nonzero");
  const auto msq = squared_error_means(preds, targets);
  OutputMetric m;
  for (std::size_t k = 0; k < kNumOutputs; ++k) m.per_output[k] = 100.0 / std::abs(ref_means[k]) * std::sqrt(msq[k]);
  m.global = total(m.per_output);
  return m;
}

MetricReport evaluate(std::span<const OutputVector> preds, std::span<const OutputVector> targets) {
  const auto e = mse(preds, targets);
  OutputVector means{};
  for (const auto& t : targets)
    for (std::size_t k = 0; k < kNumOutputs; ++k) means[k] += t[k];
  for (auto& m : means) m /= static_cast<double>(targets.size());
  const auto s = sep(preds, targets, means);
  return MetricReport{e.per_output, e.global, s.per_output, s.global, preds.size()};
}

MetricRow to_row(std::string label, const MetricReport& report, std::optional<double> links) {
  return MetricRow{std::move(label), report.mse, report.global_mse, report.sep, report.global_sep, links};
}

std::string render_metric_table(std::string_view title, std::span<const MetricRow> rows) {
  constexpr int label_w = 12;
  constexpr int w = 11;
  std::ostringstream os;
  os << title << '\n';
  os << std::left << std::setw(label_w) << "" << std::right << std::setw(5 * w) << "MSE" << std::setw(5 * w) << "SEP"
     << std::setw(w) << "#Links" << '\n';
  os << std::left << std::setw(label_w) << "";
  for (int block = 0; block < 2; ++block)
    for (const char* h : {"Global", "LAEQ", "L", "R", "SA"}) os << std::right << std::setw(w) << h;
  os << '\n';
  os << std::setprecision(4);
  for (const auto& r : rows) {
    os << std::left << std::setw(label_w) << r.label << std::right;
    os << std::setw(w) << r.global_mse;
    for (double v : r.mse) os << std::setw(w) << v;
    os << std::setw(w) << r.global_sep;
    for (double v : r.sep) os << std::setw(w) << v;
    if (r.links)
      os << std::setw(w) << *r.links;
    else
      os << std::setw(w) << "-";
    os << '\n';
  }
  return os.str();
}

}  // namespace punn
