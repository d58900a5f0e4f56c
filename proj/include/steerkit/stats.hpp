// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "steerkit/core.hpp"

namespace steer {

/// Two-sided paired sign-flip permutation test of mean(diffs) == 0.
///
/// With 16 or fewer differences every sign pattern is enumerated; otherwise
/// `permutations` random patterns are drawn and p = (1 + hits) / (1 + draws).
/// A pattern is a hit when |mean| >= |observed mean| (within 1e-12).
/// Returns 1 for empty input or when every difference is zero.
double paired_sign_flip_pvalue(const std::vector<double>& diffs, std::size_t permutations,
                               std::uint64_t seed);

std::uint64_t derive_seed_for_axis(std::uint64_t seed, BiasAxis axis);

}  // namespace steer
