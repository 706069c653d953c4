#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "htq/arrival.hpp"
#include "htq/markov.hpp"
#include "htq/stats.hpp"

namespace htq {

/// Finite-support i.i.d. service distribution over {0..s_max}.
struct ServiceDistribution {
    std::vector<double> probs;  // probs[s] = P(S = s)

    double mean() const;
    double variance() const;
    int s_max() const { return static_cast<int>(probs.size()) - 1; }

    static ServiceDistribution bernoulli(double mu);
    static ServiceDistribution table(const std::vector<int>& values,
                                     const std::vector<double>& probabilities);
};

struct SsqConfig {
    ArrivalFamily family;       // OffsetFromCapacity mapping: rate = mu - eps
    double eps = 0.0;
    ServiceDistribution service;
    double mu = 0.0;            // declared service mean, checked against service
    std::int64_t horizon = 0;   // total slots, burn-in included
    std::int64_t burn_in = -1;  // -1: max(10/eps^2, 1e5)
    std::uint64_t seed = 0;
    std::vector<double> theta_grid;  // thetas (<= 0) for the MGF estimates
    int batches = 30;

    std::int64_t effective_burn_in() const;
    void validate() const;  // throws ConfigInvalid
};

struct SsqStats {
    Estimate mean_q;
    double scaled_mean_q = 0.0;  // eps * mean_q.mean
    Estimate mean_unused;
    std::vector<std::pair<double, Estimate>> mgf;  // theta -> E[exp(eps theta Q)]
    std::int64_t recorded_slots = 0;
    bool unused_identity_ok = false;  // |mean_unused - eps| <= 4 * SE
    std::array<double, 4> quarter_means{};  // stability diagnostic

    bool operator==(const SsqStats&) const = default;
};

/// One slot of the queue recursion: q' = max(q + a - s, 0) and the unused
/// service u = q' - (q + a - s), so q' * u = 0 always holds.
inline std::pair<std::int64_t, std::int64_t> ssq_step(std::int64_t q,
                                                      std::int64_t a,
                                                      std::int64_t s) {
    std::int64_t drained = q + a - s;
    std::int64_t q_next = drained > 0 ? drained : 0;
    return {q_next, q_next - drained};
}

/// Slotted simulation from Q = 0 and a stationary chain draw. Deterministic
/// for a fixed seed. Batch-means CIs at 95%; the E[U] = eps identity is
/// reported in `unused_identity_ok` (at 4 standard errors). Throws
/// UnstableRun if the queue keeps growing across quarters of the horizon.
SsqStats simulate_ssq(const SsqConfig& config);

/// Heavy-traffic limit of E[eps * Q]: (sigma_a^2 + sigma_s^2) / 2.
double heavy_traffic_mean(double sigma_a_sq, double sigma_s_sq);

/// Smallest m >= 1 with 2 A_max C (1 - alpha^m)/(1 - alpha) < m eps / 2.
int window_m(double eps, int a_max, const MixingEnvelope& envelope);

struct PrelimitBounds {
    double lower = 0.0;   // floored at 0
    double upper = 0.0;   // +inf when vacuous
    bool upper_vacuous = false;
};

/// All-regime bounds on E[eps Q] from the m-step drift of Q^2:
///   2 (1 -+ 2 A_max C alpha^m / eps) E[eps Q] <=/>= gamma(0) + 2 sum gamma(i)
///     + sigma_s^2 +- 2m (A_max + lambda) eps (- S_max eps, lower) + eps^2.
/// gamma_prefix must hold gamma(0..m) of the eps-indexed process. The upper
/// side is vacuous when 2 A_max C alpha^m >= eps.
PrelimitBounds prelimit_bounds(double eps, int m,
                               const std::vector<double>& gamma_prefix,
                               double sigma_s_sq, int a_max, int s_max,
                               double lambda, const MixingEnvelope& envelope);

/// Limiting value of E[exp(eps theta Q)] for theta <= 0:
/// 1 / (1 - theta (sigma_a^2 + sigma_s^2) / 2).
double laplace_prediction(double theta, double sigma_a_sq, double sigma_s_sq);

}  // namespace htq
