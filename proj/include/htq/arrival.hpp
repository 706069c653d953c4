#pragma once

#include <cstdint>
#include <vector>

#include "htq/markov.hpp"

namespace htq {

/// How the heavy-traffic parameter maps to the built chain's mean rate.
/// Single-server families use OffsetFromCapacity (rate = target - eps);
/// switch families use ScaledToTarget (rate = (1 - eps) * target).
enum class RateMapping { OffsetFromCapacity, ScaledToTarget };

/// eps-indexed family of Markov-modulated arrival processes. The state space
/// and emission levels are fixed across eps; only transition probabilities
/// move, so the autocovariances converge to their eps -> 0 limits by
/// construction and the fitted mixing envelope is uniform over the sweep.
struct ArrivalFamily {
    enum class Kind { TwoState, Iid };

    Kind kind;
    RateMapping mapping;
    double target;           // v (or mu for OffsetFromCapacity)
    double burstiness = 0.0; // r, two-state only
    int peak = 0;            // k, two-state only
    std::vector<int> levels;          // iid emission values
    std::vector<double> level_probs;  // iid base distribution over levels

    /// Chain whose stationary mean is rate(eps). eps = 0 gives the limit
    /// chain used for predictions. Throws InfeasibleRate.
    FiniteMarkovChain chain(double eps) const;

    double rate(double eps) const {
        return mapping == RateMapping::OffsetFromCapacity ? target - eps
                                                          : (1.0 - eps) * target;
    }
    int a_max() const;

    /// sigma_a^2 of the limit (eps -> 0) process, computed exactly.
    double sigma_a_sq_limit(double tail_tol = 1e-12) const;

    ArrivalFamily with_target(double v) const {
        ArrivalFamily f = *this;
        f.target = v;
        return f;
    }
};

/// ON/OFF chain with emissions (0, k): pi_ON = rate/k and second eigenvalue
/// r, via p(OFF->ON) = (1-r) pi_ON and p(ON->OFF) = (1-r)(1-pi_ON).
ArrivalFamily make_two_state_family(int peak, double burstiness, double target,
                                    RateMapping mapping = RateMapping::ScaledToTarget);

/// Chain with identical rows; the base distribution is thinned toward zero
/// emission to hit the requested rate, so sigma^2 is the per-slot variance.
ArrivalFamily make_iid_family(std::vector<int> values, std::vector<double> probs,
                              double target,
                              RateMapping mapping = RateMapping::ScaledToTarget);

/// Doubly stochastic positive rate matrix for a saturated switch (row-major
/// n x n). The random variant mixes >= n random permutation matrices and a
/// uniform floor guaranteeing min entry >= 1/(2n^2).
std::vector<double> saturated_rate_matrix_uniform(int n);
std::vector<double> saturated_rate_matrix_random(int n, std::uint64_t seed);

}  // namespace htq
