#include "htq/arrival.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "htq/errors.hpp"
#include "htq/numeric.hpp"

namespace htq {

FiniteMarkovChain ArrivalFamily::chain(double eps) const {
    double rho = rate(eps);
    if (kind == Kind::TwoState) {
        double pi_on = rho / peak;
        if (!(pi_on > 0.0 && pi_on < 1.0))
            throw InfeasibleRate("two-state family: ON fraction " +
                                 std::to_string(pi_on) + " not in (0,1) at eps=" +
                                 std::to_string(eps));
        double p = (1.0 - burstiness) * pi_on;          // OFF -> ON
        double q = (1.0 - burstiness) * (1.0 - pi_on);  // ON -> OFF
        return FiniteMarkovChain({"OFF", "ON"},
                                 {{1.0 - p, p}, {q, 1.0 - q}}, {0, peak});
    }

    // Iid kind: thin the base distribution by s = rho / base_mean, moving the
    // removed mass to the zero-emission state.
    double base_mean = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i)
        base_mean += level_probs[i] * levels[i];
    if (base_mean <= 0.0)
        throw InfeasibleRate("iid family: base distribution has zero mean");
    double s = rho / base_mean;
    if (!(s > 0.0 && s <= 1.0 + 1e-15))
        throw InfeasibleRate("iid family: rate " + std::to_string(rho) +
                             " not reachable by thinning (scale " +
                             std::to_string(s) + ")");
    s = std::min(s, 1.0);

    std::vector<int> vals = levels;
    std::vector<double> probs(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) probs[i] = s * level_probs[i];
    int zero_idx = -1;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] == 0) zero_idx = static_cast<int>(i);
    if (zero_idx < 0) {
        vals.push_back(0);
        probs.push_back(0.0);
        zero_idx = static_cast<int>(vals.size()) - 1;
    }
    probs[zero_idx] += 1.0 - s;

    // Drop zero-probability states; an identical-rows chain must put positive
    // mass on every state to be irreducible.
    std::vector<std::string> names;
    std::vector<int> f;
    std::vector<double> kept;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        names.push_back("a" + std::to_string(vals[i]));
        f.push_back(vals[i]);
        kept.push_back(probs[i]);
    }
    std::vector<std::vector<double>> rows(kept.size(), kept);
    return FiniteMarkovChain(std::move(names), std::move(rows), std::move(f));
}

int ArrivalFamily::a_max() const {
    if (kind == Kind::TwoState) return peak;
    return *std::max_element(levels.begin(), levels.end());
}

double ArrivalFamily::sigma_a_sq_limit(double tail_tol) const {
    return autocovariance(chain(0.0), 4096, tail_tol).sigma_sq;
}

ArrivalFamily make_two_state_family(int peak, double burstiness, double target,
                                    RateMapping mapping) {
    if (peak < 1) throw InfeasibleRate("two-state family: peak must be >= 1");
    if (!(burstiness >= 0.0 && burstiness < 1.0))
        throw InfeasibleRate("two-state family: burstiness must be in [0,1)");
    if (!(target > 0.0 && target < peak))
        throw InfeasibleRate("two-state family: need 0 < target < peak");
    ArrivalFamily f;
    f.kind = ArrivalFamily::Kind::TwoState;
    f.mapping = mapping;
    f.target = target;
    f.burstiness = burstiness;
    f.peak = peak;
    f.levels = {0, peak};
    return f;
}

ArrivalFamily make_iid_family(std::vector<int> values, std::vector<double> probs,
                              double target, RateMapping mapping) {
    if (values.empty() || values.size() != probs.size())
        throw InfeasibleRate("iid family: values/probs mismatch");
    CompSum total;
    for (double p : probs) {
        if (p < 0.0) throw InfeasibleRate("iid family: negative probability");
        total.add(p);
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
        throw InfeasibleRate("iid family: probabilities do not sum to 1");
    for (int v : values)
        if (v < 0) throw InfeasibleRate("iid family: negative emission value");
    ArrivalFamily f;
    f.kind = ArrivalFamily::Kind::Iid;
    f.mapping = mapping;
    f.target = target;
    f.levels = std::move(values);
    f.level_probs = std::move(probs);
    return f;
}

std::vector<double> saturated_rate_matrix_uniform(int n) {
    if (n < 2) throw Error("saturated rate matrix needs n >= 2");
    return std::vector<double>(static_cast<std::size_t>(n) * n, 1.0 / n);
}

std::vector<double> saturated_rate_matrix_random(int n, std::uint64_t seed) {
    if (n < 2) throw Error("saturated rate matrix needs n >= 2");
    Rng rng(derive_seed(seed, 0x5a7, n));
    int m = 2 * n;  // permutation matrices in the mixture
    std::vector<double> weights(m);
    double wsum = 0.0;
    for (double& w : weights) {
        w = -std::log(1.0 - rng.u01());
        wsum += w;
    }

    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<int> perm(n);
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        double w = weights[k] / wsum;
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + perm[i]] += w;
    }

    // Uniform floor: keeps every entry >= 1/(2n^2) while staying doubly
    // stochastic.
    double beta = 1.0 / (2.0 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto& e = v[static_cast<std::size_t>(i) * n + j];
            e = (1.0 - beta) * e + beta / n;
        }
    return v;
}

}  // namespace htq
