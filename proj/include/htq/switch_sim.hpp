#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htq/arrival.hpp"
#include "htq/markov.hpp"
#include "htq/scheduler.hpp"
#include "htq/stats.hpp"
#include "htq/switch_geometry.hpp"

namespace htq {

/// N x N switch model: one Markov-modulated arrival chain per input-output
/// pair, independent across pairs, targeting rate matrix (1 - eps) * v.
struct SwitchModel {
    int n = 0;
    double eps = 0.0;
    std::vector<double> v;                 // row-major n x n (saturated target)
    std::vector<FiniteMarkovChain> chains; // n^2 chains, row-major

    /// Chains built per queue via family.with_target(v_ij).chain(eps).
    static SwitchModel build(const ArrivalFamily& family,
                             const std::vector<double>& v, int n, double eps);

    double v_min() const;
    double v_norm() const;  // Frobenius norm
};

struct SwitchStats {
    Estimate sum_q;                 // E[sum_ij Q_ij]
    double scaled_sum_q = 0.0;      // eps * sum_q.mean
    Estimate perp_k_sq;             // E[ ||Q_perp_K||^2 ]
    Estimate perp_l_sq;             // E[ ||Q_perp_L||^2 ]
    Estimate parallel_k_sq;         // E[ ||Q_par_K||^2 ]
    Estimate sum_unused;            // E[ sum_ij U_ij ]
    std::int64_t recorded_slots = 0;
    bool unused_identity_ok = false;  // |E[sum U] - N eps| <= 4 SE
    std::vector<std::string> warnings;

    bool operator==(const SwitchStats&) const = default;
};

/// One switch slot. The schedule must be a perfect matching; every queue on
/// it receives one unit of service after the arrivals land. Returns the
/// unused-service matrix and enforces the per-slot identities
/// U_ij Q'_ij = 0 and U_ij <= S_ij.
void switch_step(std::vector<std::int64_t>& q,
                 const std::vector<std::int64_t>& arrivals,
                 const Schedule& schedule, int n,
                 std::vector<std::int64_t>& unused);

/// Slotted MaxWeight simulation from empty queues and stationary chain draws.
/// Deterministic for a fixed seed; batch-means CIs at 95%. Warns (and
/// proceeds) when eps >= v_min / (2 ||v||), outside the collapse regime.
SwitchStats simulate_switch(const SwitchModel& model, std::int64_t horizon,
                            std::int64_t burn_in, std::uint64_t seed,
                            int batches = 30);

std::int64_t default_switch_burn_in(double eps);

/// Total queue sampled at the given slots (diagnostic runs: stability under
/// interior rates, divergence outside the capacity region).
std::vector<std::int64_t> switch_total_queue_trajectory(
    const SwitchModel& model, const std::vector<std::int64_t>& sample_slots,
    std::uint64_t seed);

/// Heavy-traffic limit of eps E[sum Q]: (1 - 1/(2N)) ||sigma||^2.
double switch_prediction(const std::vector<double>& sigma_sq_matrix, int n);

/// Universal lower bound ||sigma||^2 / 2, any stable scheduling algorithm.
double universal_lower(const std::vector<double>& sigma_sq_matrix);

/// prediction / lower = 2 - 1/N.
double optimality_ratio(int n);

}  // namespace htq
