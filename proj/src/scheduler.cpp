#include "htq/scheduler.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <mutex>
#include <numeric>

#include "htq/errors.hpp"

namespace htq {

const std::vector<std::vector<int>>& all_permutations(int n) {
    static std::array<std::vector<std::vector<int>>, 9> cache;
    static std::mutex mu;
    if (n < 1 || n > 8) throw DimensionTooLarge("permutation table limited to n <= 8");
    std::lock_guard<std::mutex> lock(mu);
    auto& entry = cache[n];
    if (entry.empty()) {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        do {
            entry.push_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    return entry;
}

std::vector<int> hungarian_max_assignment(const std::vector<double>& weight, int n) {
    // Standard shortest-augmenting-path assignment on costs = -weight,
    // 1-based potentials.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur =
                    -weight[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] -
                    u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> perm(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j]) perm[p[j] - 1] = j - 1;
    return perm;
}

std::vector<std::vector<int>> brute_force_schedules(
    const std::vector<std::int64_t>& q, int n) {
    if (n > 8) throw DimensionTooLarge("brute force enumeration limited to n <= 8");
    const auto& perms = all_permutations(n);
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    std::vector<std::vector<int>> argmax;
    for (const auto& perm : perms) {
        std::int64_t w = 0;
        for (int i = 0; i < n; ++i) w += q[static_cast<std::size_t>(i) * n + perm[i]];
        if (w > best) {
            best = w;
            argmax.clear();
        }
        if (w == best) argmax.push_back(perm);
    }
    return argmax;
}

Schedule max_weight_schedule(const std::vector<std::int64_t>& q, int n, Rng& rng) {
    if (n <= 5) {
        const auto& perms = all_permutations(n);
        std::int64_t best = std::numeric_limits<std::int64_t>::min();
        // Two passes over at most 120 permutations: find the max, then pick
        // uniformly among the ties.
        std::vector<std::int64_t> weights(perms.size());
        std::size_t ties = 0;
        for (std::size_t k = 0; k < perms.size(); ++k) {
            std::int64_t w = 0;
            const auto& perm = perms[k];
            for (int i = 0; i < n; ++i)
                w += q[static_cast<std::size_t>(i) * n + perm[i]];
            weights[k] = w;
            if (w > best) {
                best = w;
                ties = 1;
            } else if (w == best) {
                ++ties;
            }
        }
        std::size_t pick = ties > 1 ? rng.below(ties) : 0;
        for (std::size_t k = 0; k < perms.size(); ++k) {
            if (weights[k] != best) continue;
            if (pick == 0) return Schedule{perms[k]};
            --pick;
        }
        throw Error("max_weight_schedule: tie bookkeeping failed");
    }

    // Integer weights differ by >= 1, so a total perturbation below 1/2
    // cannot change the argmax set; each matching sums n entries.
    double delta = 1.0 / (2.0 * n * n + 2.0);
    std::vector<double> perturbed(q.size());
    for (std::size_t k = 0; k < q.size(); ++k)
        perturbed[k] = static_cast<double>(q[k]) + delta * rng.u01();
    return Schedule{hungarian_max_assignment(perturbed, n)};
}

}  // namespace htq
