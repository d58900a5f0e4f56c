// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "steerkit/core.hpp"

namespace steer {

/// Binary logistic regression settings. The objective is
///
///   sum_i [ log(1 + exp(z_i)) - y_i z_i ] + ||w||^2 / (2 * l2_strength),
///   z_i = x_i . w + b,
///
/// i.e. `l2_strength` plays the role of the inverse regularization weight C.
/// The intercept b is not penalized.
struct LogRegConfig {
  int max_iter = 1000;
  std::uint64_t seed = 42;
  double l2_strength = 1.0;
  double tol = 1e-4;

  void validate() const;
};

struct LogRegFit {
  HiddenVector weights;
  double bias = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_max_abs = 0.0;
  double objective = 0.0;
};

/// Truncated-Newton (Newton-CG) minimization from w = 0, b = 0 with an
/// Armijo backtracking line search. Stops when max |gradient| <= tol.
/// Fully deterministic; the seed is carried for API parity and is unused on
/// this path. On non-convergence the last (lowest-objective) iterate is
/// returned with converged = false.
LogRegFit fit_logistic(const MatrixXd& x, const Eigen::VectorXd& y, const LogRegConfig& config);

/// Fraction of rows where (x.w + b > 0) agrees with y.
double logistic_accuracy(const LogRegFit& fit, const MatrixXd& x, const Eigen::VectorXd& y);

}  // namespace steer
