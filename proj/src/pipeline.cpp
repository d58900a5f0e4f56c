// SPDX-License-Identifier: Apache-2.0

#include "steerkit/pipeline.hpp"

#include "steerkit/rng.hpp"

namespace steer {

InjectionPlan make_plan(const SteeringVector& vector, const PlanOptions& options) {
  if (!std::isfinite(options.alpha)) throw InvalidValue("alpha must be finite");
  InjectionPlan plan;
  plan.scope = options.scope;
  const HiddenVector dir = vector.injection_direction();
  if (vector.layer_id) {
    plan.entries.push_back({*vector.layer_id, dir, options.alpha});
    return plan;
  }
  std::vector<int> layers = options.layers;
  if (layers.empty() && vector.ensemble) layers = vector.ensemble->layer_ids;
  if (layers.empty()) throw ConfigError("ensemble vector without layers to inject at");
  const double alpha =
      options.alpha_total ? options.alpha / static_cast<double>(layers.size()) : options.alpha;
  for (int l : layers) plan.entries.push_back({l, dir, alpha});
  return plan;
}

std::vector<GenerationResult> generate_batch(const ToyModelState& model,
                                             const std::vector<std::vector<int>>& prompts,
                                             const GenerationConfig& gen,
                                             const InjectionPlan& plan, std::uint64_t seed) {
  std::vector<GenerationResult> out;
  out.reserve(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    GenerationConfig g = gen;
    g.rng_seed = derive_seed(seed, "gen", i);
    out.push_back(generate(model, prompts[i], g, plan));
  }
  return out;
}

std::vector<ResponsePairInput> pair_responses(const std::vector<GenerationResult>& baseline,
                                              const std::vector<GenerationResult>& steered) {
  if (baseline.size() != steered.size()) throw ShapeError("baseline/steered counts differ");
  std::vector<ResponsePairInput> out;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    ResponsePairInput p;
    p.id = std::to_string(i);
    p.baseline = baseline[i].text;
    p.steered = steered[i].text;
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

SweepPoint score_point(double alpha, const std::vector<GenerationResult>& baseline,
                       const std::vector<GenerationResult>& steered, BiasAxis axis,
                       const BiasLexicon& economic, const BiasLexicon& social,
                       const SweepConfig& config) {
  ReportOptions opts;
  opts.alpha = alpha;
  opts.permutations = config.permutations;
  opts.seed = config.seed;
  const BiasReport rep = aggregate_report(pair_responses(baseline, steered), economic, social, opts);
  const AxisAggregate& a = axis == BiasAxis::kEconomic ? rep.economic : rep.social;
  return {alpha, a.delta_bias, a.bias_before, a.bias_after, rep.quality_after};
}

}  // namespace

std::vector<SweepPoint> sweep_alpha(const ToyModelState& model,
                                    const std::vector<std::vector<int>>& prompts,
                                    const SteeringVector& vector, const BiasLexicon& economic,
                                    const BiasLexicon& social, const SweepConfig& config) {
  if (prompts.empty()) throw DegenerateInput("sweep_alpha: no prompts");
  if (config.alphas.empty()) throw DegenerateInput("sweep_alpha: no alpha values");
  const auto baseline = generate_batch(model, prompts, config.gen, {}, config.seed);
  std::vector<SweepPoint> points;
  for (double alpha : config.alphas) {
    PlanOptions po = config.plan;
    po.alpha = alpha;
    const auto steered = generate_batch(model, prompts, config.gen, make_plan(vector, po),
                                        config.seed);
    points.push_back(score_point(alpha, baseline, steered, vector.axis, economic, social, config));
  }
  return points;
}

std::vector<LayerEffect> layer_effectiveness(const ToyModelState& model,
                                             const ActivationSet& acts,
                                             const std::vector<std::vector<int>>& prompts,
                                             BiasAxis axis, const BiasLexicon& economic,
                                             const BiasLexicon& social, const SweepConfig& config) {
  if (prompts.empty()) throw DegenerateInput("layer_effectiveness: no prompts");
  const auto baseline = generate_batch(model, prompts, config.gen, {}, config.seed);
  std::vector<LayerEffect> out;
  for (int layer : acts.layer_ids()) {
    LogRegConfig lr;
    lr.seed = config.seed;
    const SteeringVector v = train_isv(acts, layer, axis, lr);
    const auto steered =
        generate_batch(model, prompts, config.gen, make_plan(v, config.plan), config.seed);
    const SweepPoint p =
        score_point(config.plan.alpha, baseline, steered, axis, economic, social, config);
    out.push_back({layer, p.delta_bias, p.quality_after});
  }
  return out;
}

}  // namespace steer
