#include "htq/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "htq/errors.hpp"
#include "htq/numeric.hpp"

namespace htq {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryTol = 1e-10;
constexpr double kFitFloor = 1e-13;   // profile points below this are rounding noise
constexpr double kAlphaGridMin = 1e-6;

// Reachability over the positive-entry graph, forward or backward.
std::vector<char> reachable(const std::vector<double>& p, int n, bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            double edge = forward ? p[static_cast<std::size_t>(u) * n + v]
                                  : p[static_cast<std::size_t>(v) * n + u];
            if (edge > 0.0 && !seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

// Period of an irreducible chain: gcd over edges (u,v) of depth(u)+1-depth(v)
// on a BFS tree from state 0.
int chain_period(const std::vector<double>& p, int n) {
    std::vector<int> depth(n, -1);
    std::vector<int> queue{0};
    depth[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int u = queue[head];
        for (int v = 0; v < n; ++v) {
            if (p[static_cast<std::size_t>(u) * n + v] > 0.0 && depth[v] < 0) {
                depth[v] = depth[u] + 1;
                queue.push_back(v);
            }
        }
    }
    int g = 0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (p[static_cast<std::size_t>(u) * n + v] > 0.0)
                g = std::gcd(g, std::abs(depth[u] + 1 - depth[v]));
    return g == 0 ? 1 : g;
}

// out = a * b for row-major n x n matrices, compensated accumulation.
void mat_mul(const std::vector<double>& a, const std::vector<double>& b, int n,
             std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            CompSum s;
            for (int k = 0; k < n; ++k)
                s.add(a[static_cast<std::size_t>(i) * n + k] *
                      b[static_cast<std::size_t>(k) * n + j]);
            out[static_cast<std::size_t>(i) * n + j] = s.value();
        }
    }
}

// gamma for the lag whose matrix power is pm.
double gamma_from_power(const FiniteMarkovChain& chain,
                        const std::vector<double>& pi, double lambda,
                        const std::vector<double>& pm) {
    int n = chain.size();
    CompSum g;
    for (int x = 0; x < n; ++x) {
        double dx = chain.emission(x) - lambda;
        CompSum inner;
        for (int y = 0; y < n; ++y)
            inner.add((pm[static_cast<std::size_t>(x) * n + y] - pi[y]) *
                      chain.emission(y));
        g.add(pi[x] * dx * inner.value());
    }
    return g.value();
}

double tv_max_to_pi(const std::vector<double>& pm, const std::vector<double>& pi,
                    int n) {
    double worst = 0.0;
    for (int x = 0; x < n; ++x) {
        CompSum s;
        for (int y = 0; y < n; ++y)
            s.add(std::abs(pm[static_cast<std::size_t>(x) * n + y] - pi[y]));
        worst = std::max(worst, 0.5 * s.value());
    }
    return worst;
}

}  // namespace

FiniteMarkovChain::FiniteMarkovChain(std::vector<std::string> states,
                                     std::vector<std::vector<double>> transition,
                                     std::vector<int> emission)
    : n_(static_cast<int>(states.size())), states_(std::move(states)) {
    if (n_ < 1) throw Error("chain needs at least one state");
    if (transition.size() != static_cast<std::size_t>(n_) ||
        emission.size() != static_cast<std::size_t>(n_))
        throw Error("transition/emission size does not match the state count");

    p_.reserve(static_cast<std::size_t>(n_) * n_);
    for (int i = 0; i < n_; ++i) {
        if (transition[i].size() != static_cast<std::size_t>(n_))
            throw Error("transition matrix is not square");
        CompSum row;
        for (double v : transition[i]) {
            if (v < 0.0) throw NonStochasticRow(i, -1.0);
            row.add(v);
            p_.push_back(v);
        }
        if (std::abs(row.value() - 1.0) > kRowSumTol)
            throw NonStochasticRow(i, row.value());
    }

    auto fwd = reachable(p_, n_, true);
    auto bwd = reachable(p_, n_, false);
    for (int s = 0; s < n_; ++s)
        if (!fwd[s] || !bwd[s]) throw Reducible(s);
    int period = chain_period(p_, n_);
    if (period != 1) throw Periodic(period);

    f_ = std::move(emission);
    for (int v : f_)
        if (v < 0) throw Error("emission values must be non-negative");
    a_max_ = *std::max_element(f_.begin(), f_.end());
}

int FiniteMarkovChain::state_index(const std::string& label) const {
    for (int i = 0; i < n_; ++i)
        if (states_[i] == label) return i;
    throw UnknownState("unknown state label: " + label);
}

FiniteMarkovChain build_chain(std::vector<std::string> states,
                              std::vector<std::vector<double>> transition,
                              std::vector<int> emission) {
    return FiniteMarkovChain(std::move(states), std::move(transition),
                             std::move(emission));
}

StationaryDistribution stationary_distribution(const FiniteMarkovChain& chain) {
    // Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1,
    // Gaussian elimination with partial pivoting.
    int n = chain.size();
    std::vector<double> a(static_cast<std::size_t>(n) * (n + 1), 0.0);
    auto at = [&](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * (n + 1) + j];
    };
    for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n; ++j) at(i, j) = chain.p(j, i) - (i == j ? 1.0 : 0.0);
        at(i, n) = 0.0;
    }
    for (int j = 0; j < n; ++j) at(n - 1, j) = 1.0;
    at(n - 1, n) = 1.0;

    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
        if (std::abs(at(piv, col)) < 1e-14)
            throw SolverFailure("stationary solve: singular system at column " +
                                std::to_string(col));
        if (piv != col)
            for (int j = col; j <= n; ++j) std::swap(at(piv, j), at(col, j));
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double factor = at(r, col) / at(col, col);
            if (factor == 0.0) continue;
            for (int j = col; j <= n; ++j) at(r, j) -= factor * at(col, j);
        }
    }

    StationaryDistribution out;
    out.probabilities.resize(n);
    for (int i = 0; i < n; ++i) out.probabilities[i] = at(i, n) / at(i, i);

    // Clean tiny negatives from elimination roundoff and renormalize.
    for (double& v : out.probabilities) {
        if (v < -1e-12)
            throw SolverFailure("stationary solve produced a negative probability");
        v = std::max(v, 0.0);
    }
    double total = comp_total(out.probabilities);
    for (double& v : out.probabilities) v /= total;

    // Residual check ||pi P - pi||_inf.
    double resid = 0.0;
    for (int y = 0; y < n; ++y) {
        CompSum s;
        for (int x = 0; x < n; ++x) s.add(out.probabilities[x] * chain.p(x, y));
        resid = std::max(resid, std::abs(s.value() - out.probabilities[y]));
    }
    if (resid > kStationaryTol)
        throw SolverFailure("stationary residual " + std::to_string(resid) +
                            " exceeds tolerance");

    CompSum lam;
    for (int x = 0; x < n; ++x)
        lam.add(out.probabilities[x] * chain.emission(x));
    out.mean_emission = lam.value();
    return out;
}

std::vector<double> mixing_profile(const FiniteMarkovChain& chain, int m_max) {
    if (m_max < 1) throw Error("mixing_profile requires m_max >= 1");
    int n = chain.size();
    auto pi = stationary_distribution(chain).probabilities;
    std::vector<double> pm = chain.matrix();
    std::vector<double> next;
    std::vector<double> profile;
    profile.reserve(m_max);
    profile.push_back(tv_max_to_pi(pm, pi, n));
    for (int m = 2; m <= m_max; ++m) {
        mat_mul(pm, chain.matrix(), n, next);
        pm.swap(next);
        profile.push_back(tv_max_to_pi(pm, pi, n));
    }
    return profile;
}

double MixingEnvelope::bound(int m) const {
    if (exact_mixing) return 0.0;
    return c_const * std::pow(alpha, m);
}

MixingEnvelope fit_mixing_envelope(const std::vector<double>& profile) {
    if (profile.size() < 3) throw Error("envelope fit needs at least 3 profile points");

    int first = -1;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile[i] > kFitFloor) {
            first = static_cast<int>(i);
            break;
        }
    }
    if (first < 0)
        return MixingEnvelope{1.0, kAlphaGridMin, static_cast<int>(profile.size()),
                              true};

    // Non-mixing numeric evidence: no decay visible at the end of the profile.
    double last_kept = 0.0;
    for (std::size_t i = profile.size(); i-- > 0;) {
        if (profile[i] > kFitFloor) {
            last_kept = profile[i];
            break;
        }
    }
    if (last_kept >= 1.0 - 1e-9)
        throw EnvelopeInfeasible("TV distance does not decay over the profile");

    // Smallest alpha whose anchored envelope dominates every reliable point:
    // the knee of the (alpha, minimal C) trade-off, solved in log space.
    int m1 = first + 1;  // profile[k] corresponds to m = k + 1
    double d1 = profile[first];
    double log_alpha = -1e9;
    for (std::size_t k = first + 1; k < profile.size(); ++k) {
        if (profile[k] <= kFitFloor) continue;
        int m = static_cast<int>(k) + 1;
        log_alpha = std::max(log_alpha,
                             (std::log(profile[k]) - std::log(d1)) / (m - m1));
    }
    double alpha;
    if (log_alpha <= -1e8) {
        // Single reliable point: decay rate unresolved, take the envelope that
        // reaches the noise floor at the end of the profile.
        int span = static_cast<int>(profile.size()) - m1;
        alpha = span > 0 ? std::exp((std::log(kFitFloor) - std::log(d1)) / span)
                         : 0.5;
        alpha = std::max(alpha, kAlphaGridMin);
    } else {
        alpha = std::exp(log_alpha);
    }
    if (alpha >= 1.0)
        throw EnvelopeInfeasible("fitted decay rate is not below 1");
    alpha = std::max(alpha, kAlphaGridMin);

    double c = d1 / std::pow(alpha, m1);
    return MixingEnvelope{c, alpha, static_cast<int>(profile.size()), false};
}

AutocovarianceSummary autocovariance(const FiniteMarkovChain& chain, int t_max,
                                     double tail_tol) {
    if (tail_tol <= 0.0) throw Error("tail_tol must be positive");
    int n = chain.size();
    auto stat = stationary_distribution(chain);
    const auto& pi = stat.probabilities;
    double lambda = stat.mean_emission;
    double a_max = chain.a_max();

    MixingEnvelope env = fit_mixing_envelope(mixing_profile(chain, std::max(t_max, 8)));

    auto tail_bound = [&](int t) {
        if (env.exact_mixing) return 0.0;
        return 2.0 * (a_max + lambda) * a_max * env.c_const *
               std::pow(env.alpha, t) / (1.0 - env.alpha);
    };

    AutocovarianceSummary out;
    // gamma(0) = Var_pi(f)
    {
        CompSum s;
        for (int x = 0; x < n; ++x) {
            double d = chain.emission(x) - lambda;
            s.add(pi[x] * d * d);
        }
        out.gamma.push_back(s.value());
    }

    std::vector<double> pm = chain.matrix();
    std::vector<double> next;
    CompSum tail_sum;
    int t = 0;
    double stop_bound = tail_bound(1);
    while (t < t_max) {
        ++t;
        if (t > 1) {
            mat_mul(pm, chain.matrix(), n, next);
            pm.swap(next);
        }
        double g = gamma_from_power(chain, pi, lambda, pm);
        out.gamma.push_back(g);
        tail_sum.add(g);
        stop_bound = tail_bound(t);
        if (stop_bound < tail_tol) break;
    }
    out.truncation_tail = stop_bound;
    out.sigma_sq = out.gamma[0] + 2.0 * tail_sum.value();
    // The limit is a variance rate; truncation can leave a tiny negative.
    if (out.sigma_sq < 0.0 && out.sigma_sq > -(stop_bound + 1e-12))
        out.sigma_sq = 0.0;
    return out;
}

std::vector<double> gamma_prefix(const FiniteMarkovChain& chain, int t_max) {
    int n = chain.size();
    auto stat = stationary_distribution(chain);
    const auto& pi = stat.probabilities;
    double lambda = stat.mean_emission;

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(t_max) + 1);
    {
        CompSum s;
        for (int x = 0; x < n; ++x) {
            double d = chain.emission(x) - lambda;
            s.add(pi[x] * d * d);
        }
        out.push_back(s.value());
    }
    std::vector<double> pm = chain.matrix();
    std::vector<double> next;
    for (int t = 1; t <= t_max; ++t) {
        if (t > 1) {
            mat_mul(pm, chain.matrix(), n, next);
            pm.swap(next);
        }
        out.push_back(gamma_from_power(chain, pi, lambda, pm));
    }
    return out;
}

int draw_from(const std::vector<double>& distribution, Rng& rng) {
    double u = rng.u01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < distribution.size(); ++i) {
        acc += distribution[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(distribution.size()) - 1;
}

namespace {
SamplePath run_path(const FiniteMarkovChain& chain, int x0, std::int64_t length,
                    Rng& rng, bool keep_states) {
    SamplePath path;
    path.emissions.reserve(static_cast<std::size_t>(length));
    if (keep_states) path.states.reserve(static_cast<std::size_t>(length));
    int x = x0;
    for (std::int64_t t = 0; t < length; ++t) {
        path.emissions.push_back(chain.emission(x));
        if (keep_states) path.states.push_back(x);
        x = chain_step(chain, x, rng);
    }
    return path;
}
}  // namespace

SamplePath sample_path(const FiniteMarkovChain& chain, int initial_state,
                       std::int64_t length, std::uint64_t seed, bool keep_states) {
    if (length < 1) throw Error("sample_path requires length >= 1");
    if (initial_state < 0 || initial_state >= chain.size())
        throw UnknownState("initial state index out of range");
    Rng rng(seed);
    return run_path(chain, initial_state, length, rng, keep_states);
}

SamplePath sample_path(const FiniteMarkovChain& chain,
                       const std::vector<double>& initial_distribution,
                       std::int64_t length, std::uint64_t seed, bool keep_states) {
    if (length < 1) throw Error("sample_path requires length >= 1");
    if (initial_distribution.size() != static_cast<std::size_t>(chain.size()))
        throw UnknownState("initial distribution size does not match the chain");
    Rng rng(seed);
    int x0 = draw_from(initial_distribution, rng);
    return run_path(chain, x0, length, rng, keep_states);
}

}  // namespace htq
