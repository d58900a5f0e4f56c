// SPDX-License-Identifier: Apache-2.0

#include "steerkit/isv.hpp"

#include <cmath>

namespace steer {

std::string_view to_string(VectorMethod method) {
  switch (method) {
    case VectorMethod::kLogReg: return "logreg";
    case VectorMethod::kMeanDiff: return "meandiff";
    case VectorMethod::kEnsemble: return "ensemble";
  }
  return "unknown";
}

VectorMethod parse_method(std::string_view text) {
  if (text == "logreg" || text == "isv") return VectorMethod::kLogReg;
  if (text == "meandiff") return VectorMethod::kMeanDiff;
  if (text == "ensemble" || text == "sve") return VectorMethod::kEnsemble;
  throw ConfigError("unknown vector method '" + std::string(text) + "'");
}

double quality_q(double accuracy, double separation) {
  return 0.6 * accuracy + 0.4 * std::min(separation / 2.0, 1.0);
}

HiddenVector SteeringVector::injection_direction() const {
  if (!destandardize_scale) return direction;
  return unit_normalize(direction.cwiseProduct(*destandardize_scale));
}

bool operator==(const SteeringVector& a, const SteeringVector& b) {
  const bool scales_equal =
      a.destandardize_scale.has_value() == b.destandardize_scale.has_value() &&
      (!a.destandardize_scale || same_values(*a.destandardize_scale, *b.destandardize_scale));
  return same_values(a.direction, b.direction) && a.layer_id == b.layer_id && a.axis == b.axis &&
         a.language == b.language && a.method == b.method && a.quality == b.quality &&
         a.ensemble == b.ensemble && scales_equal && a.converged == b.converged &&
         a.sign_corrected == b.sign_corrected;
}

QualityScore assess_quality(const MatrixXd& acts_std_pos, const MatrixXd& acts_std_neg,
                            const HiddenVector& v) {
  const Eigen::Index np = acts_std_pos.rows();
  const Eigen::Index nn = acts_std_neg.rows();
  if (np < 1 || nn < 1 || np + nn < 4) {
    throw DegenerateInput("assess_quality: need >= 1 row per side and >= 4 in total, got " +
                          std::to_string(np) + " + " + std::to_string(nn));
  }
  if (acts_std_pos.cols() != v.size() || acts_std_neg.cols() != v.size()) {
    throw ShapeError("assess_quality: direction length does not match activations");
  }
  if (std::abs(v.norm() - 1.0) > 1e-6) {
    throw InvalidValue("assess_quality: direction is not unit norm");
  }
  const Eigen::VectorXd proj_pos = acts_std_pos * v;
  const Eigen::VectorXd proj_neg = acts_std_neg * v;

  QualityScore qs;
  qs.mu_pos = proj_pos.mean();
  qs.mu_neg = proj_neg.mean();
  const double ss_pos = (proj_pos.array() - qs.mu_pos).square().sum();
  const double ss_neg = (proj_neg.array() - qs.mu_neg).square().sum();
  qs.pooled_std = std::sqrt((ss_pos + ss_neg) / static_cast<double>(np + nn - 2));
  if (!(qs.pooled_std >= kMinStd)) qs.pooled_std = kMinStd;
  qs.separation = std::abs(qs.mu_pos - qs.mu_neg) / qs.pooled_std;

  const double mid = 0.5 * (qs.mu_pos + qs.mu_neg);
  const Eigen::Index correct = (proj_pos.array() > mid).count() + (proj_neg.array() <= mid).count();
  qs.accuracy = static_cast<double>(correct) / static_cast<double>(np + nn);
  qs.q = quality_q(qs.accuracy, qs.separation);
  return qs;
}

std::pair<HiddenVector, bool> orient_direction(const HiddenVector& v, const MatrixXd& pos,
                                               const MatrixXd& neg) {
  const double mp = (pos * v).mean();
  const double mn = (neg * v).mean();
  if (mp <= mn) return {-v, true};
  return {v, false};
}

namespace {

struct Stacked {
  MatrixXd pos_std;
  MatrixXd neg_std;
  StandardizationParams params;
};

Stacked stack_and_standardize(const ActivationSet& acts, int layer_id, std::size_t min_per_side) {
  const MatrixXd pos = acts.rows_with_stance(layer_id, Stance::kPositive);
  const MatrixXd neg = acts.rows_with_stance(layer_id, Stance::kNegative);
  if (static_cast<std::size_t>(pos.rows()) < min_per_side ||
      static_cast<std::size_t>(neg.rows()) < min_per_side) {
    throw DegenerateInput("layer " + std::to_string(layer_id) + ": need >= " +
                          std::to_string(min_per_side) + " rows per stance, have " +
                          std::to_string(pos.rows()) + " positive / " +
                          std::to_string(neg.rows()) + " negative");
  }
  MatrixXd x(pos.rows() + neg.rows(), acts.hidden_dim());
  x << pos, neg;
  Stacked s;
  s.params = standardize_fit(x);
  const MatrixXd xs = standardize_apply(x, s.params);
  s.pos_std = xs.topRows(pos.rows());
  s.neg_std = xs.bottomRows(neg.rows());
  return s;
}

}  // namespace

SteeringVector train_isv(const ActivationSet& acts, int layer_id, BiasAxis axis,
                         const LogRegConfig& config, const LanguageTag& language) {
  const Stacked s = stack_and_standardize(acts, layer_id, 2);
  MatrixXd x(s.pos_std.rows() + s.neg_std.rows(), acts.hidden_dim());
  x << s.pos_std, s.neg_std;
  Eigen::VectorXd y(x.rows());
  y.head(s.pos_std.rows()).setOnes();
  y.tail(s.neg_std.rows()).setZero();

  const LogRegFit fit = fit_logistic(x, y, config);

  HiddenVector theta = fit.weights;
  if (!(theta.norm() > kMinStd)) {
    theta = HiddenVector::Unit(acts.hidden_dim(), 0);
  }
  auto [direction, flipped] = orient_direction(unit_normalize(theta), s.pos_std, s.neg_std);

  SteeringVector sv;
  sv.direction = std::move(direction);
  sv.sign_corrected = flipped;
  sv.layer_id = layer_id;
  sv.axis = axis;
  sv.language = language;
  sv.method = VectorMethod::kLogReg;
  sv.converged = fit.converged;
  sv.destandardize_scale = s.params.stds.cwiseInverse();
  sv.quality = assess_quality(s.pos_std, s.neg_std, sv.direction);
  return sv;
}

SteeringVector train_meandiff(const ActivationSet& acts, int layer_id, BiasAxis axis,
                              const LanguageTag& language) {
  const Stacked s = stack_and_standardize(acts, layer_id, 1);
  const HiddenVector diff =
      s.pos_std.colwise().mean().transpose() - s.neg_std.colwise().mean().transpose();
  auto [direction, flipped] = orient_direction(unit_normalize(diff), s.pos_std, s.neg_std);

  SteeringVector sv;
  sv.direction = std::move(direction);
  sv.sign_corrected = flipped;
  sv.layer_id = layer_id;
  sv.axis = axis;
  sv.language = language;
  sv.method = VectorMethod::kMeanDiff;
  sv.destandardize_scale = s.params.stds.cwiseInverse();
  sv.quality = assess_quality(s.pos_std, s.neg_std, sv.direction);
  return sv;
}

std::vector<LayerSimilarity> layer_similarity_profile(const ActivationSet& acts) {
  std::vector<LayerSimilarity> out;
  for (int layer_id : acts.layer_ids()) {
    const MatrixXd pos = acts.rows_with_stance(layer_id, Stance::kPositive);
    const MatrixXd neg = acts.rows_with_stance(layer_id, Stance::kNegative);
    if (pos.rows() < 1 || neg.rows() < 1) {
      throw DegenerateInput("layer_similarity_profile: need >= 1 row per stance");
    }
    const HiddenVector mp = pos.colwise().mean().transpose();
    const HiddenVector mn = neg.colwise().mean().transpose();
    out.push_back({layer_id, cosine_similarity(mp, mn)});
  }
  return out;
}

}  // namespace steer
