#pragma once

#include <cstdint>
#include <vector>

#include "htq/rng.hpp"

namespace htq {

/// Perfect matching: input i is matched to output perm[i].
struct Schedule {
    std::vector<int> perm;

    std::int64_t weight(const std::vector<std::int64_t>& q, int n) const {
        std::int64_t w = 0;
        for (int i = 0; i < n; ++i) w += q[static_cast<std::size_t>(i) * n + perm[i]];
        return w;
    }
};

/// Maximum-weight assignment, O(n^3) augmenting-path form. Returns one
/// optimal permutation; ties resolved by the algorithm's scan order.
std::vector<int> hungarian_max_assignment(const std::vector<double>& weight, int n);

/// All weight-maximizing permutations by enumeration (test oracle, n <= 8).
std::vector<std::vector<int>> brute_force_schedules(
    const std::vector<std::int64_t>& q, int n);

/// MaxWeight schedule for an integer queue matrix, uniform over the argmax
/// set. Exact (enumeration) for n <= 5; for larger n an i.i.d. perturbation
/// below half the integer weight gap keeps the argmax set intact and breaks
/// ties approximately uniformly.
Schedule max_weight_schedule(const std::vector<std::int64_t>& q, int n, Rng& rng);

/// Shared permutation tables for the enumeration path.
const std::vector<std::vector<int>>& all_permutations(int n);

}  // namespace htq
