// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "steerkit/evals.hpp"
#include "steerkit/toymodel.hpp"

namespace steer {

/// A seeded toy model with a planted lexicon preference.
///
/// Two orthonormal, zero-mean directions are written into the weights:
/// `bias_direction` u and `space_direction` s. The prompt markers '+' and '-'
/// carry +marker_gain * u and -marker_gain * u in their embeddings. The
/// output head can only emit ' ', 'p' and 'n': 'p' reads +head_gain * u,
/// 'n' reads -head_gain * u and gets an extra `negative_logit`, so unsteered
/// output leans towards "n". The space token is written along s and its logit
/// reads -space_gain * s, which makes the model alternate letters and spaces.
struct ToyTaskConfig {
  ToyModelConfig model;
  double marker_gain = 4.0;
  double space_embed = 3.0;
  double space_gain = 12.0;
  double space_logit = 4.0;
  double head_gain = 0.25;
  double negative_logit = 0.3;
  double blocked_logit = -30.0;
};

struct ToyTask {
  ToyModelState model;
  HiddenVector bias_direction;
  HiddenVector space_direction;
};

ToyTask build_toy_task(const ToyTaskConfig& config = {});

/// Lexicon of the toy task: economic {"p"} vs {"n"}, social {"pp"} vs {"nn"}.
BiasLexicon toy_lexicon(BiasAxis axis);

/// n_pairs random neutral strings, each emitted once ending in '+' (positive)
/// and once ending in '-' (negative). Ids follow pair order: 2k and 2k+1.
std::vector<LabeledPrompt> toy_contrastive_prompts(std::size_t n_pairs, std::uint64_t seed,
                                                   std::size_t length = 12);

/// Random neutral strings of lowercase letters and spaces, ending in a letter.
std::vector<std::vector<int>> toy_neutral_prompts(std::size_t count, std::uint64_t seed,
                                                  std::size_t length = 12);

}  // namespace steer
