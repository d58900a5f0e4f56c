// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <utility>
#include <vector>

#include "steerkit/activations.hpp"
#include "steerkit/logistic.hpp"
#include "steerkit/steering_vector.hpp"

namespace steer {

/// Projection statistics of standardized positive/negative activations onto
/// a unit direction `v`.
///
/// mu_pos / mu_neg are the projection means. pooled_std is the Bessel-corrected
/// two-sample pooled standard deviation of the projections, floored at 1e-12.
/// accuracy thresholds projections at (mu_pos + mu_neg) / 2, predicting
/// positive strictly above the midpoint.
///
/// Throws DegenerateInput when either side is empty or there are fewer than
/// four rows in total, InvalidValue when `v` is not unit norm.
QualityScore assess_quality(const MatrixXd& acts_std_pos, const MatrixXd& acts_std_neg,
                            const HiddenVector& v);

/// Returns `v` or `-v`, whichever gives mean(pos . v) > mean(neg . v). The
/// bool is true when negation was needed (ties negate).
std::pair<HiddenVector, bool> orient_direction(const HiddenVector& v, const MatrixXd& pos,
                                               const MatrixXd& neg);

/// Logistic-regression steering vector for one layer.
///
/// Positive and negative rows are stacked, standardized (population std,
/// constant columns pass through), and fitted with `fit_logistic`. The
/// feature weights, normalized to unit length, form the direction; the
/// intercept is dropped. The direction is then oriented so the positive
/// class projects higher and scored with assess_quality on the standardized
/// data. If the weights vanish (indistinguishable classes) the first basis
/// vector is used.
///
/// The stored direction is in standardized space; destandardize_scale holds
/// 1/std for mapping back to raw activations.
SteeringVector train_isv(const ActivationSet& acts, int layer_id, BiasAxis axis,
                         const LogRegConfig& config = {}, const LanguageTag& language = {});

/// Mean-difference steering vector: normalize(mean(pos) - mean(neg)) over
/// standardized activations. Throws ZeroNormError when the means coincide.
SteeringVector train_meandiff(const ActivationSet& acts, int layer_id, BiasAxis axis,
                              const LanguageTag& language = {});

struct LayerSimilarity {
  int layer_id = 0;
  double cosine = 0.0;
};

/// cosine(mean(pos), mean(neg)) per layer on raw activations.
std::vector<LayerSimilarity> layer_similarity_profile(const ActivationSet& acts);

}  // namespace steer
