// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "steerkit/steering_vector.hpp"

namespace steer {

struct EnsembleSpec {
  std::vector<SteeringVector> members;  // sorted by layer id
  std::vector<double> weights;          // w_l = q_l / sum_i q_i
};

struct EnsembleResult {
  SteeringVector vector;
  EnsembleSpec spec;
};

/// Quality-weighted steering vector ensemble.
///
///   w_l = q_l / sum_i q_i,  v = normalize(sum_l w_l * v_l)
///
/// Members are combined through their injection directions (raw residual
/// space) and ordered by layer id, so the result does not depend on input
/// order. Zero-quality members stay in with weight 0. The ensemble's quality
/// block holds the weight-averaged member accuracy, separation, means and
/// pooled std, with q recomputed from the averaged accuracy and separation.
///
/// Errors: no members -> DegenerateInput; mixed axis or language ->
/// AxisMismatch; mixed dims, duplicate layers or non-unit members ->
/// ShapeError; all q == 0 -> AllZeroQuality; cancelling sum -> ZeroNormError.
EnsembleResult build_sve(const std::vector<SteeringVector>& members);

struct EnsembleReportRow {
  int layer_id = 0;
  double weight = 0.0;
  double q = 0.0;
};

/// Layer -> weight / quality table in ascending layer order.
std::vector<EnsembleReportRow> ensemble_report(const EnsembleSpec& spec);

}  // namespace steer
