// SPDX-License-Identifier: Apache-2.0

#include "steerkit/pairgen.hpp"

#include <algorithm>
#include <numeric>

namespace steer {

void PairGenConfig::validate() const {
  if (!(tau > -1.0 && tau <= 1.0)) {
    throw ConfigError("pairgen: tau must lie in (-1, 1], got " + std::to_string(tau));
  }
  if (max_pairs_per_category < 1 || max_comparisons < 1) {
    throw ConfigError("pairgen: caps must be >= 1");
  }
}

PairGenResult build_pairs(const std::vector<CandidatePrompt>& candidates,
                          const PairGenConfig& config) {
  config.validate();
  PairGenResult result;

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = candidates[a];
    const auto& y = candidates[b];
    if (x.category != y.category) return x.category < y.category;
    if (x.statement_id != y.statement_id) return x.statement_id < y.statement_id;
    // Positive sorts first.
    return x.stance == Stance::kPositive && y.stance == Stance::kNegative;
  });

  const bool any_pos = std::any_of(candidates.begin(), candidates.end(),
                                   [](const auto& c) { return c.stance == Stance::kPositive; });
  const bool any_neg = std::any_of(candidates.begin(), candidates.end(),
                                   [](const auto& c) { return c.stance == Stance::kNegative; });
  if (!any_pos || !any_neg) {
    result.warnings.push_back(std::string(error_code_name(ErrorCode::kNoPairsPossible)) +
                              ": candidates lack a " + (any_pos ? "negative" : "positive") +
                              " prompt");
    return result;
  }

  std::size_t begin = 0;
  while (begin < order.size() && result.comparisons < config.max_comparisons) {
    const std::string& category = candidates[order[begin]].category;
    std::size_t end = begin;
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    while (end < order.size() && candidates[order[end]].category == category) {
      (candidates[order[end]].stance == Stance::kPositive ? pos : neg).push_back(order[end]);
      ++end;
    }

    std::size_t emitted = 0;
    for (std::size_t p : pos) {
      if (emitted >= config.max_pairs_per_category ||
          result.comparisons >= config.max_comparisons) {
        break;
      }
      for (std::size_t n : neg) {
        if (emitted >= config.max_pairs_per_category ||
            result.comparisons >= config.max_comparisons) {
          break;
        }
        ++result.comparisons;
        const double sim =
            cosine_similarity(candidates[p].embedding, candidates[n].embedding);
        if (sim < config.tau) {
          result.pairs.push_back({candidates[p], candidates[n], sim, category});
          ++emitted;
        }
      }
    }
    begin = end;
  }
  return result;
}

PairStats pair_stats(const std::vector<ContrastivePair>& pairs) {
  PairStats s;
  s.count = pairs.size();
  if (pairs.empty()) return s;
  double lo = pairs.front().similarity;
  double hi = lo;
  double sum = 0.0;
  for (const auto& p : pairs) {
    ++s.count_per_category[p.category];
    lo = std::min(lo, p.similarity);
    hi = std::max(hi, p.similarity);
    sum += p.similarity;
  }
  s.min_similarity = lo;
  s.max_similarity = hi;
  s.mean_similarity = sum / static_cast<double>(pairs.size());
  return s;
}

}  // namespace steer
