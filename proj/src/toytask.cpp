// SPDX-License-Identifier: Apache-2.0

#include "steerkit/toytask.hpp"

#include <string_view>

#include "steerkit/rng.hpp"

namespace steer {

namespace {

// Letters used for neutral text; excludes the lexicon letters.
constexpr std::string_view kNeutral = "abcdefghijklmoqrstuvwxyz";

HiddenVector random_direction(Xoshiro256& rng, int d) {
  HiddenVector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.symmetric(1.0);
  v.array() -= v.mean();
  return v;
}

std::string neutral_text(Xoshiro256& rng, std::size_t length) {
  std::string s;
  for (std::size_t i = 0; i < length; ++i) {
    const bool space = i > 0 && i + 1 < length && s.back() != ' ' && rng.below(4) == 0;
    s += space ? ' ' : kNeutral[rng.below(kNeutral.size())];
  }
  return s;
}

}  // namespace

ToyTask build_toy_task(const ToyTaskConfig& config) {
  ToyTask task;
  task.model = init_model(config.model);
  const int d = config.model.d_model;
  if (d < 2) throw ConfigError("toy task needs d_model >= 2");

  // Gram-Schmidt on two zero-mean random vectors; zero mean keeps the
  // directions intact through LayerNorm centering.
  Xoshiro256 rng(derive_seed(config.model.seed, "toytask", 0));
  HiddenVector u = unit_normalize(random_direction(rng, d));
  HiddenVector s = random_direction(rng, d);
  s -= s.dot(u) * u;
  s = unit_normalize(s);
  task.bias_direction = u;
  task.space_direction = s;

  auto& m = task.model;
  m.token_embedding.row(' ') += config.space_embed * s.transpose();
  m.token_embedding.row('+') += config.marker_gain * u.transpose();
  m.token_embedding.row('-') -= config.marker_gain * u.transpose();

  m.head.setZero();
  m.head_bias.setConstant(config.blocked_logit);
  m.head.row(' ') = -config.space_gain * s.transpose();
  m.head_bias(' ') = config.space_logit;
  m.head.row('p') = config.head_gain * u.transpose();
  m.head_bias('p') = 0.0;
  m.head.row('n') = -config.head_gain * u.transpose();
  m.head_bias('n') = config.negative_logit;
  return task;
}

BiasLexicon toy_lexicon(BiasAxis axis) {
  if (axis == BiasAxis::kEconomic) return BiasLexicon::make(axis, LanguageTag("en"), {"p"}, {"n"});
  return BiasLexicon::make(axis, LanguageTag("en"), {"pp"}, {"nn"});
}

std::vector<LabeledPrompt> toy_contrastive_prompts(std::size_t n_pairs, std::uint64_t seed,
                                                   std::size_t length) {
  if (length < 1) throw ConfigError("prompt length must be >= 1");
  Xoshiro256 rng(derive_seed(seed, "toy-contrastive", 0));
  std::vector<LabeledPrompt> out;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const std::string base = neutral_text(rng, length);
    out.push_back({2 * k, Stance::kPositive, encode_bytes(base + "+")});
    out.push_back({2 * k + 1, Stance::kNegative, encode_bytes(base + "-")});
  }
  return out;
}

std::vector<std::vector<int>> toy_neutral_prompts(std::size_t count, std::uint64_t seed,
                                                  std::size_t length) {
  if (length < 1) throw ConfigError("prompt length must be >= 1");
  Xoshiro256 rng(derive_seed(seed, "toy-neutral", 0));
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(encode_bytes(neutral_text(rng, length)));
  return out;
}

}  // namespace steer
