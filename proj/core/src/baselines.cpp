#include "punn/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <vector>

#include "punn/error.hpp"
#include "punn/text.hpp"

namespace punn {

std::string_view to_string(Regularization r) noexcept {
  switch (r) {
    case Regularization::None: return "LinearReg";
    case Regularization::Ridge: return "Ridge";
    case Regularization::Lasso: return "Lasso";
    case Regularization::ElasticNet: return "ElasticNet";
  }
  return "?";
}

OutputVector LinearModel::predict(const InputVector& x) const noexcept {
  OutputVector y = intercept;
  for (std::size_t k = 0; k < kNumOutputs; ++k)
    for (const auto& [i, b] : coefficients[k]) y[k] += b * x[i];
  return y;
}

double LinearModel::coefficient(std::size_t k, std::size_t i) const noexcept {
  const auto it = coefficients[k].find(i);
  return it == coefficients[k].end() ? 0.0 : it->second;
}

std::size_t count_links(const LinearModel& model) noexcept {
  std::size_t links = kNumOutputs;
  for (const auto& c : model.coefficients) links += c.size();
  return links;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Centered {
  MatrixXd x;  // n x 40, column-centered
  MatrixXd y;  // n x 4, column-centered
  VectorXd x_mean;
  VectorXd y_mean;
};

Centered center(const Dataset& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Centered c{MatrixXd(n, kNumInputs), MatrixXd(n, kNumOutputs), {}, {}};
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& p = data[static_cast<std::size_t>(r)];
    for (std::size_t i = 0; i < kNumInputs; ++i) c.x(r, static_cast<Eigen::Index>(i)) = p.inputs[i];
    for (std::size_t k = 0; k < kNumOutputs; ++k) c.y(r, static_cast<Eigen::Index>(k)) = p.outputs[k];
  }
  c.x_mean = c.x.colwise().mean().transpose();
  c.y_mean = c.y.colwise().mean().transpose();
  c.x.rowwise() -= c.x_mean.transpose();
  c.y.rowwise() -= c.y_mean.transpose();
  return c;
}

LinearModel assemble(const MatrixXd& beta, const Centered& c, Regularization kind, double lambda, double ratio) {
  LinearModel m;
  m.kind = kind;
  m.lambda = lambda;
  m.ratio = ratio;
  for (std::size_t k = 0; k < kNumOutputs; ++k) {
    double intercept = c.y_mean(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < kNumInputs; ++i) {
      const double b = beta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (b != 0.0) {
        m.coefficients[k][i] = b;
        intercept -= b * c.x_mean(static_cast<Eigen::Index>(i));
      }
    }
    m.intercept[k] = intercept;
  }
  return m;
}

void require_rows(const Dataset& train) {
  if (train.empty()) throw ValidationError("baseline fit needs a non-empty training set");
  if (!train.has_outputs()) throw ValidationError("baseline fit needs output columns");
}

MatrixXd solve_normal_equations(const Centered& c, double lambda) {
  MatrixXd gram = c.x.transpose() * c.x;
  gram.diagonal().array() += lambda;
  const MatrixXd rhs = c.x.transpose() * c.y;
  return gram.ldlt().solve(rhs);
}

// Solves the stationarity equations exactly on the support and sign pattern
// found by coordinate descent. The solution replaces `b` only when it keeps
// the signs and satisfies the optimality bound on every inactive coordinate.
void polish_active_set(const MatrixXd& gram, const VectorXd& corr, const VectorXd& scale, double l1, double l2,
                       Eigen::Ref<VectorXd> b) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < b.size(); ++j)
    if (b(j) != 0.0) active.push_back(j);
  if (active.empty()) return;
  const auto m = static_cast<Eigen::Index>(active.size());
  MatrixXd g(m, m);
  VectorXd rhs(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index c = 0; c < m; ++c) g(a, c) = gram(active[a], active[c]);
    g(a, a) += l2;
    rhs(a) = corr(active[a]) - l1 * (b(active[a]) > 0.0 ? 1.0 : -1.0);
  }
  const Eigen::ColPivHouseholderQR<MatrixXd> qr(g);
  if (qr.rank() < m) return;
  const VectorXd sol = qr.solve(rhs);
  if (!sol.allFinite()) return;
  VectorXd full = VectorXd::Zero(b.size());
  for (Eigen::Index a = 0; a < m; ++a) {
    if ((sol(a) > 0.0) != (b(active[a]) > 0.0) || sol(a) == 0.0) return;
    full(active[a]) = sol(a);
  }
  const VectorXd grad = corr - gram * full;
  for (Eigen::Index j = 0; j < b.size(); ++j)
    if (full(j) == 0.0 && scale(j) > 0.0 && std::abs(grad(j)) > l1 * (1.0 + 1e-9) + 1e-12) return;
  b = full;
}

}  // namespace

LinearModel fit_linear(const Dataset& train, const LinearFitOptions& options) {
  require_rows(train);
  const auto c = center(train);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(c.x);
  const bool full_rank = train.size() > kNumInputs && qr.rank() == static_cast<Eigen::Index>(kNumInputs);
  if (!full_rank) {
    if (!options.rank_fallback)
      throw ValidationError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                            std::to_string(kNumInputs) + ", n = " + std::to_string(train.size()) + ")");
    const std::string msg = "rank-deficient design; falling back to ridge with lambda = 1e-8";
    if (options.on_warning)
      options.on_warning(msg);
    else
      std::cerr << "warning: " << msg << '\n';
    auto m = assemble(solve_normal_equations(c, 1e-8), c, Regularization::None, 1e-8, 0.0);
    return m;
  }
  return assemble(solve_normal_equations(c, 0.0), c, Regularization::None, 0.0, 0.0);
}

LinearModel fit_ridge(const Dataset& train, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("ridge lambda must be finite and >= 0");
  require_rows(train);
  if (lambda == 0.0) {
    auto m = fit_linear(train);
    m.kind = Regularization::Ridge;
    return m;
  }
  const auto c = center(train);
  return assemble(solve_normal_equations(c, lambda), c, Regularization::Ridge, lambda, 0.0);
}

LinearModel fit_elastic_net(const Dataset& train, double lambda, double ratio) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ArgumentError("elastic-net lambda must be finite and >= 0");
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ArgumentError("elastic-net ratio must lie in [0, 1]");
  require_rows(train);
  constexpr double kTolerance = 1e-7;
  constexpr int kMaxSweeps = 10000;

  const auto c = center(train);
  const auto n = static_cast<double>(train.size());
  VectorXd scale = (c.x.colwise().squaredNorm() / n).array().sqrt().transpose();
  MatrixXd z = c.x;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    if (scale(j) > 0.0) z.col(j) /= scale(j);
  // Covariance-update form: gram and correlations are computed once.
  const MatrixXd gram = z.transpose() * z / n;
  const MatrixXd corr = z.transpose() * c.y / n;

  const double l1 = lambda * ratio;
  const double l2 = lambda * (1.0 - ratio);
  MatrixXd beta = MatrixXd::Zero(kNumInputs, kNumOutputs);
  bool converged = true;
  int max_sweeps = 0;
  for (Eigen::Index k = 0; k < beta.cols(); ++k) {
    auto b = beta.col(k);
    VectorXd grad = corr.col(k);  // z' r / n with r the current residual
    int sweep = 0;
    bool done = false;
    while (sweep < kMaxSweeps && !done) {
      ++sweep;
      double max_change = 0.0;
      for (Eigen::Index j = 0; j < b.size(); ++j) {
        if (scale(j) == 0.0) continue;
        const double rho = grad(j) + b(j);  // gram(j, j) == 1
        const double shrunk = std::copysign(std::max(std::abs(rho) - l1, 0.0), rho) / (1.0 + l2);
        const double delta = shrunk - b(j);
        if (delta != 0.0) {
          grad -= gram.col(j) * delta;
          b(j) = shrunk;
          max_change = std::max(max_change, std::abs(delta));
        }
      }
      done = max_change < kTolerance;
    }
    converged = converged && done;
    max_sweeps = std::max(max_sweeps, sweep);
    if (done) polish_active_set(gram, corr.col(k), scale, l1, l2, b);
  }
  for (Eigen::Index j = 0; j < beta.rows(); ++j)
    if (scale(j) > 0.0) beta.row(j) /= scale(j);

  const auto kind = ratio == 1.0 ? Regularization::Lasso : Regularization::ElasticNet;
  auto m = assemble(beta, c, kind, lambda, ratio);
  m.converged = converged;
  m.sweeps = max_sweeps;
  return m;
}

LinearModel fit_lasso(const Dataset& train, double lambda) { return fit_elastic_net(train, lambda, 1.0); }

double lasso_critical_lambda(const Dataset& train, std::size_t k) {
  require_rows(train);
  if (k >= kNumOutputs) throw ArgumentError("output index out of range");
  const auto c = center(train);
  const auto n = static_cast<double>(train.size());
  double best = 0.0;
  for (Eigen::Index j = 0; j < c.x.cols(); ++j) {
    const double s = std::sqrt(c.x.col(j).squaredNorm() / n);
    if (s == 0.0) continue;
    best = std::max(best, std::abs(c.x.col(j).dot(c.y.col(static_cast<Eigen::Index>(k)))) / (s * n));
  }
  return best;
}

double select_lambda(const Dataset& train, Regularization kind, std::span<const double> grid, std::uint64_t seed,
                     double ratio, int folds) {
  if (grid.empty()) throw ArgumentError("lambda grid is empty");
  if (folds < 2) throw ArgumentError("cross-validation needs at least two folds");
  require_rows(train);
  std::vector<double> lambdas(grid.begin(), grid.end());
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  if (lambdas.size() == 1) return lambdas.front();

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(seed);
  std::shuffle(order.begin(), order.end(), engine);
  std::vector<std::vector<std::size_t>> fit_idx(static_cast<std::size_t>(folds));
  std::vector<std::vector<std::size_t>> hold_idx(static_cast<std::size_t>(folds));
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto f = pos % static_cast<std::size_t>(folds);
    for (std::size_t g = 0; g < hold_idx.size(); ++g) (g == f ? hold_idx[g] : fit_idx[g]).push_back(order[pos]);
  }

  double best_lambda = lambdas.front();
  double best_error = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    double sse = 0.0;
    for (std::size_t f = 0; f < hold_idx.size(); ++f) {
      const auto fit_set = train.subset(fit_idx[f]);
      LinearModel m;
      switch (kind) {
        case Regularization::None: m = fit_linear(fit_set); break;
        case Regularization::Ridge: m = fit_ridge(fit_set, lambda); break;
        case Regularization::Lasso: m = fit_lasso(fit_set, lambda); break;
        case Regularization::ElasticNet: m = fit_elastic_net(fit_set, lambda, ratio); break;
      }
      for (auto i : hold_idx[f]) {
        const auto y = m.predict(train[i].inputs);
        for (std::size_t k = 0; k < kNumOutputs; ++k) {
          const double e = train[i].outputs[k] - y[k];
          sse += e * e;
        }
      }
    }
    const double error = sse / static_cast<double>(train.size());
    if (error < best_error) {
      best_error = error;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

}  // namespace punn
