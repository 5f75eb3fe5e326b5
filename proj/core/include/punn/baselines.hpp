#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string_view>

#include "punn/dataset.hpp"
#include "punn/schema.hpp"

namespace punn {

enum class Regularization { None, Ridge, Lasso, ElasticNet };

std::string_view to_string(Regularization r) noexcept;

/// Four independent linear regressions sharing the 40 inputs.
///
/// Coefficients are sparse: an input absent from an output's map has an
/// exactly-zero coefficient.
struct LinearModel {
  std::array<std::map<std::size_t, double>, kNumOutputs> coefficients;
  OutputVector intercept{};
  Regularization kind = Regularization::None;
  double lambda = 0.0;
  /// L1 share of the elastic-net penalty (1 = lasso, 0 = ridge).
  double ratio = 0.0;
  bool converged = true;
  int sweeps = 0;

  OutputVector predict(const InputVector& x) const noexcept;
  double coefficient(std::size_t k, std::size_t i) const noexcept;
};

/// nonzero coefficients + the four intercepts.
std::size_t count_links(const LinearModel& model) noexcept;

struct LinearFitOptions {
  /// On a rank-deficient design, refit as ridge with lambda = 1e-8 instead of throwing.
  bool rank_fallback = true;
  std::function<void(std::string_view)> on_warning;
};

/// Ordinary least squares per output via normal equations on centered data.
LinearModel fit_linear(const Dataset& train, const LinearFitOptions& options = {});

/// Solves (Xc'Xc + lambda I) b = Xc'yc per output on centered data.
LinearModel fit_ridge(const Dataset& train, double lambda);

/// Cyclic coordinate descent on standardized inputs minimizing
///   1/(2n) |y - Zb|^2 + lambda (ratio |b|_1 + (1 - ratio)/2 |b|^2),
/// stopping when the largest coefficient change falls below 1e-7 or after
/// 10000 sweeps (converged = false). A converged solution is then polished by
/// solving the stationarity equations on its support and sign pattern.
/// Coefficients are mapped back to the input scale.
LinearModel fit_elastic_net(const Dataset& train, double lambda, double ratio);
LinearModel fit_lasso(const Dataset& train, double lambda);

/// Smallest lambda for which the lasso sets every coefficient of output k to
/// zero: max_j |z_j' (y - mean y)| / n over standardized inputs z_j.
double lasso_critical_lambda(const Dataset& train, std::size_t k);

/// 5-fold cross-validated choice from `grid` minimizing the held-out global
/// MSE. Fold membership is a seeded shuffle; ties go to the larger lambda.
double select_lambda(const Dataset& train, Regularization kind, std::span<const double> grid, std::uint64_t seed,
                     double ratio = 0.5, int folds = 5);

}  // namespace punn
