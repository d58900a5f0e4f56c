// SPDX-License-Identifier: Apache-2.0

#include "steerkit/sve.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace steer {

EnsembleResult build_sve(const std::vector<SteeringVector>& members) {
  if (members.empty()) throw DegenerateInput("build_sve: no members");
  const auto& first = members.front();
  std::set<int> seen_layers;
  for (const auto& m : members) {
    if (m.axis != first.axis) throw AxisMismatch("build_sve: members mix bias axes");
    if (m.language != first.language) throw AxisMismatch("build_sve: members mix languages");
    if (m.dim() != first.dim()) throw ShapeError("build_sve: members differ in hidden dim");
    if (!m.layer_id) throw ShapeError("build_sve: member without a layer id");
    if (!seen_layers.insert(*m.layer_id).second) {
      throw ShapeError("build_sve: duplicate layer " + std::to_string(*m.layer_id));
    }
    if (std::abs(m.direction.norm() - 1.0) > 1e-6) {
      throw ShapeError("build_sve: member direction is not unit norm");
    }
    if (!(m.quality.q >= 0.0)) throw InvalidValue("build_sve: negative member quality");
  }

  EnsembleResult out;
  out.spec.members = members;
  std::sort(out.spec.members.begin(), out.spec.members.end(),
            [](const auto& a, const auto& b) { return *a.layer_id < *b.layer_id; });

  double q_sum = 0.0;
  for (const auto& m : out.spec.members) q_sum += m.quality.q;
  if (!(q_sum > 0.0)) throw AllZeroQuality("build_sve: every member has q = 0");

  HiddenVector combined = HiddenVector::Zero(first.dim());
  QualityScore avg{0, 0, 0, 0, 0, 0};
  EnsembleProvenance prov;
  for (const auto& m : out.spec.members) {
    const double w = m.quality.q / q_sum;
    out.spec.weights.push_back(w);
    combined += w * m.injection_direction();
    avg.accuracy += w * m.quality.accuracy;
    avg.separation += w * m.quality.separation;
    avg.mu_pos += w * m.quality.mu_pos;
    avg.mu_neg += w * m.quality.mu_neg;
    avg.pooled_std += w * m.quality.pooled_std;
    prov.layer_ids.push_back(*m.layer_id);
    prov.weights.push_back(w);
    prov.member_q.push_back(m.quality.q);
  }
  if (!(combined.norm() > kMinStd)) {
    throw ZeroNormError("build_sve: weighted member directions cancel");
  }
  avg.q = quality_q(avg.accuracy, avg.separation);

  SteeringVector& v = out.vector;
  const auto active = std::count_if(out.spec.weights.begin(), out.spec.weights.end(),
                                    [](double w) { return w > 0.0; });
  if (active == 1) {
    // A lone contributor is returned as-is rather than renormalized.
    const auto idx = std::find_if(out.spec.weights.begin(), out.spec.weights.end(),
                                  [](double w) { return w > 0.0; }) -
                     out.spec.weights.begin();
    v.direction = out.spec.members[static_cast<std::size_t>(idx)].injection_direction();
  } else {
    v.direction = unit_normalize(combined);
  }
  v.layer_id.reset();
  v.axis = first.axis;
  v.language = first.language;
  v.method = VectorMethod::kEnsemble;
  v.quality = avg;
  v.ensemble = std::move(prov);
  v.converged = std::all_of(members.begin(), members.end(), [](const auto& m) { return m.converged; });
  return out;
}

std::vector<EnsembleReportRow> ensemble_report(const EnsembleSpec& spec) {
  std::vector<EnsembleReportRow> rows;
  for (std::size_t i = 0; i < spec.members.size(); ++i) {
    rows.push_back({spec.members[i].layer_id.value_or(-1), spec.weights.at(i),
                    spec.members[i].quality.q});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.layer_id < b.layer_id; });
  return rows;
}

}  // namespace steer
