#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "htq/rng.hpp"

namespace htq {

/// Finite irreducible aperiodic Markov chain with a non-negative integer
/// emission attached to each state. Immutable after construction; the
/// constructor rejects non-stochastic, reducible, or periodic inputs.
class FiniteMarkovChain {
   public:
    FiniteMarkovChain(std::vector<std::string> states,
                      std::vector<std::vector<double>> transition,
                      std::vector<int> emission);

    int size() const { return n_; }
    const std::vector<std::string>& states() const { return states_; }
    double p(int x, int y) const { return p_[static_cast<std::size_t>(x) * n_ + y]; }
    const std::vector<double>& matrix() const { return p_; }
    int emission(int x) const { return f_[x]; }
    const std::vector<int>& emissions() const { return f_; }
    int a_max() const { return a_max_; }
    int state_index(const std::string& label) const;  // throws UnknownState

   private:
    int n_;
    std::vector<std::string> states_;
    std::vector<double> p_;  // row-major n x n
    std::vector<int> f_;
    int a_max_;
};

struct StationaryDistribution {
    std::vector<double> probabilities;  // pi
    double mean_emission;               // lambda = E_pi[f]
};

/// Geometric envelope max_x TV(P^m(x,.), pi) <= c_const * alpha^m for
/// m = 1..horizon, fitted from an exact TV profile.
struct MixingEnvelope {
    double c_const;
    double alpha;
    int horizon;
    bool exact_mixing = false;  // profile was identically zero

    double bound(int m) const;  // c_const * alpha^m, 0 if exact_mixing
};

struct AutocovarianceSummary {
    std::vector<double> gamma;  // gamma(0), gamma(1), ..., gamma(T)
    double sigma_sq;            // gamma(0) + 2 * sum_{t>=1} gamma(t), truncated
    double truncation_tail;     // geometric bound on the discarded tail
};

FiniteMarkovChain build_chain(std::vector<std::string> states,
                              std::vector<std::vector<double>> transition,
                              std::vector<int> emission);

StationaryDistribution stationary_distribution(const FiniteMarkovChain& chain);

/// Exact TV-to-stationarity profile d(m) = max_x TV(P^m(x,.), pi), m = 1..m_max,
/// with TV(mu,nu) = (1/2) sum |mu - nu|. Computed by repeated matrix powers
/// with compensated accumulation. d(m) need not be monotone in m.
std::vector<double> mixing_profile(const FiniteMarkovChain& chain, int m_max);

/// Tightest geometric envelope over the profile: smallest alpha such that the
/// envelope anchored at the first reliably-nonzero profile point dominates
/// every later reliable point, then the smallest C at that alpha. Points below
/// the accumulation noise floor are excluded from the fit; envelope soundness
/// downstream is always checked with a 1e-12 absolute slack to cover them.
MixingEnvelope fit_mixing_envelope(const std::vector<double>& profile);

/// Exact autocovariance of the emitted process started from stationarity:
///   gamma(t) = sum_x pi(x) (f(x)-lambda) sum_y (P^t(x,y)-pi(y)) f(y).
/// The sigma^2 sum stops once the geometric tail bound
/// 2 (A_max+lambda) A_max C alpha^t / (1-alpha) drops below tail_tol
/// (or at t_max); the bound at the stopping lag is reported.
AutocovarianceSummary autocovariance(const FiniteMarkovChain& chain, int t_max,
                                     double tail_tol);

/// Exact gamma(0..t_max) with no adaptive stopping (bounds need the full
/// prefix even where the tail is negligible).
std::vector<double> gamma_prefix(const FiniteMarkovChain& chain, int t_max);

struct SamplePath {
    std::vector<int> emissions;
    std::vector<int> states;
};

SamplePath sample_path(const FiniteMarkovChain& chain, int initial_state,
                       std::int64_t length, std::uint64_t seed,
                       bool keep_states = false);
SamplePath sample_path(const FiniteMarkovChain& chain,
                       const std::vector<double>& initial_distribution,
                       std::int64_t length, std::uint64_t seed,
                       bool keep_states = false);

/// One chain step: returns the next state index.
inline int chain_step(const FiniteMarkovChain& chain, int x, Rng& rng) {
    double u = rng.u01();
    double acc = 0.0;
    int n = chain.size();
    for (int y = 0; y + 1 < n; ++y) {
        acc += chain.p(x, y);
        if (u < acc) return y;
    }
    return n - 1;
}

int draw_from(const std::vector<double>& distribution, Rng& rng);

}  // namespace htq
