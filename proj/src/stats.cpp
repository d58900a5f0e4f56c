// SPDX-License-Identifier: Apache-2.0

#include "steerkit/stats.hpp"

#include <cmath>

#include "steerkit/rng.hpp"

namespace steer {

double paired_sign_flip_pvalue(const std::vector<double>& diffs, std::size_t permutations,
                               std::uint64_t seed) {
  const std::size_t n = diffs.size();
  if (n == 0) return 1.0;
  double sum = 0.0;
  bool all_zero = true;
  for (double d : diffs) {
    sum += d;
    all_zero = all_zero && d == 0.0;
  }
  if (all_zero) return 1.0;
  const double observed = std::abs(sum) - 1e-12;

  if (n <= 16) {
    const std::uint32_t patterns = 1u << n;
    std::size_t hits = 0;
    for (std::uint32_t mask = 0; mask < patterns; ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (mask >> i) & 1u ? -diffs[i] : diffs[i];
      if (std::abs(s) >= observed) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(patterns);
  }

  Xoshiro256 rng(seed);
  std::size_t hits = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    double s = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng.next();
      s += (bits >> (i % 64)) & 1u ? -diffs[i] : diffs[i];
    }
    if (std::abs(s) >= observed) ++hits;
  }
  return static_cast<double>(1 + hits) / static_cast<double>(1 + permutations);
}

std::uint64_t derive_seed_for_axis(std::uint64_t seed, BiasAxis axis) {
  return derive_seed(seed, "signflip", static_cast<std::uint64_t>(axis));
}

}  // namespace steer
