// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "steerkit/core.hpp"

namespace steer {

struct PCTStatement {
  int id = 0;  // 1..62
  std::string text;
  BiasAxis axis = BiasAxis::kEconomic;
  LanguageTag language;
  std::string category;
};

/// One framing of a statement together with its sentence embedding. The
/// embeddings are produced outside this library.
struct CandidatePrompt {
  int statement_id = 0;
  Stance stance = Stance::kPositive;
  std::string category;
  std::string text;
  HiddenVector embedding;
};

struct ContrastivePair {
  CandidatePrompt positive;
  CandidatePrompt negative;
  double similarity = 0.0;
  std::string category;
};

struct PairGenConfig {
  double tau = 0.15;
  std::size_t max_pairs_per_category = 30;
  std::size_t max_comparisons = 500;

  void validate() const;
};

struct PairGenResult {
  std::vector<ContrastivePair> pairs;
  std::size_t comparisons = 0;
  std::vector<std::string> warnings;
};

/// Forms positive x negative pairs within each category, keeping those whose
/// embedding cosine similarity is below `tau`.
///
/// Candidates are stably sorted by (category, statement_id, stance with
/// Positive first). Within a category every positive is compared against every
/// negative in that order. Each comparison counts against the run-wide
/// `max_comparisons` budget whether or not it emits; a category stops once it
/// holds `max_pairs_per_category` pairs. A prompt may appear in several pairs.
///
/// If either stance is absent the result is empty with a NoPairsPossible
/// warning instead of an exception.
PairGenResult build_pairs(const std::vector<CandidatePrompt>& candidates,
                          const PairGenConfig& config = {});

struct PairStats {
  std::map<std::string, std::size_t> count_per_category;
  std::size_t count = 0;
  std::optional<double> min_similarity;
  std::optional<double> max_similarity;
  std::optional<double> mean_similarity;
};

PairStats pair_stats(const std::vector<ContrastivePair>& pairs);

}  // namespace steer
