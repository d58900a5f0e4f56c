// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "steerkit/evals.hpp"
#include "steerkit/isv.hpp"
#include "steerkit/plot.hpp"
#include "steerkit/steering_vector.hpp"
#include "steerkit/toymodel.hpp"

namespace steer {

/// Default probe layers for external 7B-class models and for the toy model.
inline const std::vector<int> kExternalDefaultLayers{8, 12, 16, 20, 24};
inline const std::vector<int> kToyDefaultLayers{1, 2, 3, 4, 5};

struct PlanOptions {
  double alpha = 1.0;
  /// Ensembles only: divide alpha by the number of injected layers.
  bool alpha_total = false;
  InjectionScope scope = InjectionScope::kLastToken;
  /// Ensembles only: layers to inject at. Empty means the member layers.
  std::vector<int> layers;
};

/// Single-layer plan for a layer-bound vector, one entry per layer (same
/// direction) for an ensemble. Uses the vector's injection direction.
InjectionPlan make_plan(const SteeringVector& vector, const PlanOptions& options);

/// Generates one continuation per prompt. Prompt i samples with the seed
/// derive_seed(seed, "gen", i), so steered and unsteered runs share random
/// numbers.
std::vector<GenerationResult> generate_batch(const ToyModelState& model,
                                             const std::vector<std::vector<int>>& prompts,
                                             const GenerationConfig& gen,
                                             const InjectionPlan& plan, std::uint64_t seed);

std::vector<ResponsePairInput> pair_responses(const std::vector<GenerationResult>& baseline,
                                              const std::vector<GenerationResult>& steered);

struct SweepConfig {
  std::vector<double> alphas{0.0, 0.5, 1.0, 1.5, 2.0};
  GenerationConfig gen;
  PlanOptions plan;  // alpha is overridden per sweep point
  std::uint64_t seed = 42;
  std::size_t permutations = 0;  // significance test per point; 0 disables
};

/// Delta bias on `vector.axis` for each alpha: baseline generations are
/// produced once, steered generations per alpha, and scored with
/// aggregate_report.
std::vector<SweepPoint> sweep_alpha(const ToyModelState& model,
                                    const std::vector<std::vector<int>>& prompts,
                                    const SteeringVector& vector, const BiasLexicon& economic,
                                    const BiasLexicon& social, const SweepConfig& config);

/// Trains a logistic steering vector per layer and measures its delta bias
/// at config.plan.alpha.
std::vector<LayerEffect> layer_effectiveness(const ToyModelState& model,
                                             const ActivationSet& acts,
                                             const std::vector<std::vector<int>>& prompts,
                                             BiasAxis axis, const BiasLexicon& economic,
                                             const BiasLexicon& social, const SweepConfig& config);

}  // namespace steer
