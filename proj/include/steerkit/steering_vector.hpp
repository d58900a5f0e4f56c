// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "steerkit/core.hpp"

namespace steer {

enum class VectorMethod : std::uint8_t { kLogReg = 0, kMeanDiff = 1, kEnsemble = 2 };

std::string_view to_string(VectorMethod method);
VectorMethod parse_method(std::string_view text);

/// Probe quality along a direction:
///   q = 0.6 * accuracy + 0.4 * min(separation / 2, 1)
///   separation = |mu_pos - mu_neg| / pooled_std
struct QualityScore {
  double accuracy = 0.0;
  double separation = 0.0;
  double mu_pos = 0.0;
  double mu_neg = 0.0;
  double pooled_std = 1.0;
  double q = 0.0;

  friend bool operator==(const QualityScore&, const QualityScore&) = default;
};

/// q from accuracy and separation.
double quality_q(double accuracy, double separation);

struct EnsembleProvenance {
  std::vector<int> layer_ids;
  std::vector<double> weights;
  std::vector<double> member_q;

  friend bool operator==(const EnsembleProvenance&, const EnsembleProvenance&) = default;
};

/// A unit direction in hidden space.
///
/// Probe-trained vectors live in the standardized feature space of their
/// training layer; `destandardize_scale` (1/std per feature) maps them back to
/// the raw residual space. Ensemble vectors are already in raw space.
struct SteeringVector {
  HiddenVector direction;
  std::optional<int> layer_id;  // absent for ensembles
  BiasAxis axis = BiasAxis::kEconomic;
  LanguageTag language;
  VectorMethod method = VectorMethod::kLogReg;
  QualityScore quality;
  std::optional<EnsembleProvenance> ensemble;
  std::optional<HiddenVector> destandardize_scale;
  bool converged = true;
  /// Set when the direction check had to negate the probe direction.
  bool sign_corrected = false;

  Eigen::Index dim() const { return direction.size(); }

  /// Unit direction to add to the raw residual stream:
  /// normalize(direction .* destandardize_scale), or `direction` itself when
  /// no scale is stored.
  HiddenVector injection_direction() const;

  friend bool operator==(const SteeringVector& a, const SteeringVector& b);
};

}  // namespace steer
