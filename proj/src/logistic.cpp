// SPDX-License-Identifier: Apache-2.0

#include "steerkit/logistic.hpp"

#include <cmath>

namespace steer {

void LogRegConfig::validate() const {
  if (max_iter < 1) throw ConfigError("logreg: max_iter must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("logreg: tol must be > 0");
  if (!(l2_strength > 0.0)) throw ConfigError("logreg: l2_strength must be > 0");
}

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Problem {
  const MatrixXd& x;
  const Eigen::VectorXd& y;
  double inv_c;

  double objective(const HiddenVector& w, double b) const {
    const Eigen::VectorXd z = (x * w).array() + b;
    double f = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) f += softplus(z(i)) - y(i) * z(i);
    return f + 0.5 * inv_c * w.squaredNorm();
  }
};

}  // namespace

LogRegFit fit_logistic(const MatrixXd& x, const Eigen::VectorXd& y, const LogRegConfig& config) {
  config.validate();
  if (x.rows() != y.size()) throw ShapeError("fit_logistic: x/y row mismatch");
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Problem prob{x, y, 1.0 / config.l2_strength};

  LogRegFit fit;
  fit.weights = HiddenVector::Zero(d);
  fit.bias = 0.0;
  double f = prob.objective(fit.weights, fit.bias);

  Eigen::VectorXd p(n);
  Eigen::VectorXd curv(n);
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd z = (x * fit.weights).array() + fit.bias;
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = sigmoid(z(i));
      curv(i) = p(i) * (1.0 - p(i));
    }
    const Eigen::VectorXd resid = p - y;
    HiddenVector gw = x.transpose() * resid + prob.inv_c * fit.weights;
    const double gb = resid.sum();
    fit.grad_max_abs = std::max(gw.cwiseAbs().maxCoeff(), std::abs(gb));
    fit.iterations = iter;
    if (fit.grad_max_abs <= config.tol) {
      fit.converged = true;
      break;
    }
    if (iter == config.max_iter) break;

    // Conjugate gradient on H s = -g, with H s = [X^T D (X s_w + s_b) + s_w / C ; 1^T D (X s_w + s_b)].
    auto hess_vec = [&](const HiddenVector& sw, double sb, HiddenVector& out_w, double& out_b) {
      const Eigen::VectorXd t = curv.cwiseProduct((x * sw).array().matrix() +
                                                  Eigen::VectorXd::Constant(n, sb));
      out_w = x.transpose() * t + prob.inv_c * sw;
      out_b = t.sum();
    };
    HiddenVector sw = HiddenVector::Zero(d);
    double sb = 0.0;
    HiddenVector rw = -gw;
    double rb = -gb;
    HiddenVector pw = rw;
    double pb = rb;
    double rr = rw.squaredNorm() + rb * rb;
    const double g_norm = std::sqrt(rr);
    const double cg_tol = std::min(0.5, std::sqrt(g_norm)) * g_norm;
    const int max_cg = static_cast<int>(d) + 10;
    HiddenVector hw;
    double hb = 0.0;
    for (int k = 0; k < max_cg && std::sqrt(rr) > cg_tol * 1e-3; ++k) {
      hess_vec(pw, pb, hw, hb);
      const double curvature = pw.dot(hw) + pb * hb;
      if (curvature <= 0.0) break;
      const double a = rr / curvature;
      sw += a * pw;
      sb += a * pb;
      rw -= a * hw;
      rb -= a * hb;
      const double rr_new = rw.squaredNorm() + rb * rb;
      if (std::sqrt(rr_new) <= cg_tol * 1e-3) {
        rr = rr_new;
        break;
      }
      const double beta = rr_new / rr;
      pw = rw + beta * pw;
      pb = rb + beta * pb;
      rr = rr_new;
    }
    if (sw.squaredNorm() + sb * sb == 0.0) {
      sw = -gw;
      sb = -gb;
    }

    // Armijo backtracking.
    const double slope = gw.dot(sw) + gb * sb;
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const HiddenVector w_try = fit.weights + step * sw;
      const double b_try = fit.bias + step * sb;
      const double f_try = prob.objective(w_try, b_try);
      if (f_try <= f + 1e-4 * step * slope) {
        fit.weights = w_try;
        fit.bias = b_try;
        f = f_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    fit.iterations = iter + 1;
  }
  fit.objective = f;
  return fit;
}

double logistic_accuracy(const LogRegFit& fit, const MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd z = (x * fit.weights).array() + fit.bias;
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if ((z(i) > 0.0) == (y(i) > 0.5)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(z.size());
}

}  // namespace steer
