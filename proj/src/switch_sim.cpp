#include "htq/switch_sim.hpp"

#include <algorithm>
#include <cmath>

#include "htq/errors.hpp"
#include "htq/numeric.hpp"

namespace htq {

SwitchModel SwitchModel::build(const ArrivalFamily& family,
                               const std::vector<double>& v, int n, double eps) {
    if (v.size() != static_cast<std::size_t>(n) * n)
        throw ConfigInvalid("switch model: rate matrix is not n x n");
    SwitchModel m;
    m.n = n;
    m.eps = eps;
    m.v = v;
    m.chains.reserve(v.size());
    for (double vij : v) m.chains.push_back(family.with_target(vij).chain(eps));
    return m;
}

double SwitchModel::v_min() const {
    return *std::min_element(v.begin(), v.end());
}

double SwitchModel::v_norm() const {
    CompSum s;
    for (double x : v) s.add(x * x);
    return std::sqrt(s.value());
}

void switch_step(std::vector<std::int64_t>& q,
                 const std::vector<std::int64_t>& arrivals,
                 const Schedule& schedule, int n,
                 std::vector<std::int64_t>& unused) {
    std::fill(unused.begin(), unused.end(), 0);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += arrivals[k];
    for (int i = 0; i < n; ++i) {
        std::size_t k = static_cast<std::size_t>(i) * n + schedule.perm[i];
        if (q[k] > 0) {
            q[k] -= 1;
        } else {
            unused[k] = 1;
        }
        if (unused[k] * q[k] != 0)
            throw Error("switch slot identity U * Q' = 0 violated");
    }
}

std::int64_t default_switch_burn_in(double eps) {
    auto b = static_cast<std::int64_t>(10.0 / (eps * eps));
    return std::max<std::int64_t>(b, 100000);
}

namespace {

struct ChainRunner {
    const FiniteMarkovChain* chain;
    Rng rng;
    int state;

    ChainRunner(const FiniteMarkovChain& c, std::uint64_t seed, Rng& init_rng)
        : chain(&c), rng(seed), state(0) {
        auto pi = stationary_distribution(c).probabilities;
        state = draw_from(pi, init_rng);
    }

    std::int64_t emit_and_step() {
        std::int64_t a = chain->emission(state);
        state = chain_step(*chain, state, rng);
        return a;
    }
};

std::vector<ChainRunner> make_runners(const SwitchModel& model,
                                      std::uint64_t seed) {
    Rng init_rng(derive_seed(seed, 10));
    std::vector<ChainRunner> runners;
    runners.reserve(model.chains.size());
    for (int i = 0; i < model.n; ++i)
        for (int j = 0; j < model.n; ++j)
            runners.emplace_back(model.chains[static_cast<std::size_t>(i) * model.n + j],
                                 derive_seed(seed, 11, i, j), init_rng);
    return runners;
}

}  // namespace

SwitchStats simulate_switch(const SwitchModel& model, std::int64_t horizon,
                            std::int64_t burn_in, std::uint64_t seed,
                            int batches) {
    const int n = model.n;
    if (burn_in < 0) burn_in = default_switch_burn_in(model.eps);
    if (burn_in >= horizon)
        throw ConfigInvalid("switch: burn-in must be smaller than the horizon");

    SwitchStats out;
    double threshold = model.v_min() / (2.0 * model.v_norm());
    if (model.eps >= threshold)
        out.warnings.push_back(
            "eps=" + std::to_string(model.eps) + " is not below v_min/(2||v||)=" +
            std::to_string(threshold) + "; collapse bounds may not apply");

    auto runners = make_runners(model, seed);
    Rng tie_rng(derive_seed(seed, 12));

    const std::int64_t recorded = horizon - burn_in;
    BatchMeans sumq_b(recorded, batches), perpk_b(recorded, batches),
        perpl_b(recorded, batches), park_b(recorded, batches),
        sumu_b(recorded, batches);
    const std::int64_t record_end = burn_in + sumq_b.used_slots();

    std::vector<std::int64_t> q(static_cast<std::size_t>(n) * n, 0);
    std::vector<std::int64_t> arrivals(q.size(), 0);
    std::vector<std::int64_t> unused(q.size(), 0);
    std::vector<double> qd(q.size(), 0.0);
    ConeProjector projector(n);

    for (std::int64_t t = 0; t < horizon; ++t) {
        if (t >= burn_in && t < record_end) {
            std::int64_t total = 0;
            double norm_sq = 0.0;
            for (std::size_t k = 0; k < q.size(); ++k) {
                total += q[k];
                qd[k] = static_cast<double>(q[k]);
                norm_sq += qd[k] * qd[k];
            }
            double perp_k = projector.perp_norm_sq(qd);
            double par_l = norm_parallel_L_sq(qd, n);
            double perp_l = norm_sq - par_l;
            if (perp_l > perp_k + 1e-6 * (1.0 + norm_sq))
                throw Error("switch: ||Q_perp_L|| <= ||Q_perp_K|| violated");
            sumq_b.add(static_cast<double>(total));
            perpk_b.add(perp_k);
            perpl_b.add(std::max(perp_l, 0.0));
            park_b.add(norm_sq - perp_k);
        }

        Schedule schedule = max_weight_schedule(q, n, tie_rng);
        for (std::size_t k = 0; k < q.size(); ++k)
            arrivals[k] = runners[k].emit_and_step();
        switch_step(q, arrivals, schedule, n, unused);

        if (t >= burn_in && t < record_end) {
            std::int64_t total_u = 0;
            for (std::int64_t u : unused) total_u += u;
            sumu_b.add(static_cast<double>(total_u));
        }
    }

    out.sum_q = sumq_b.estimate();
    out.scaled_sum_q = model.eps * out.sum_q.mean;
    out.perp_k_sq = perpk_b.estimate();
    out.perp_l_sq = perpl_b.estimate();
    out.parallel_k_sq = park_b.estimate();
    out.sum_unused = sumu_b.estimate();
    out.recorded_slots = sumq_b.used_slots();

    double u_se = out.sum_unused.ci_halfwidth / t_quantile_975(batches - 1);
    out.unused_identity_ok =
        std::abs(out.sum_unused.mean - n * model.eps) <= 4.0 * u_se;
    return out;
}

std::vector<std::int64_t> switch_total_queue_trajectory(
    const SwitchModel& model, const std::vector<std::int64_t>& sample_slots,
    std::uint64_t seed) {
    const int n = model.n;
    auto runners = make_runners(model, seed);
    Rng tie_rng(derive_seed(seed, 12));

    std::vector<std::int64_t> q(static_cast<std::size_t>(n) * n, 0);
    std::vector<std::int64_t> arrivals(q.size(), 0);
    std::vector<std::int64_t> unused(q.size(), 0);

    std::int64_t last = 0;
    for (std::int64_t s : sample_slots) last = std::max(last, s);
    std::vector<std::int64_t> samples;
    samples.reserve(sample_slots.size());

    for (std::int64_t t = 0; t <= last; ++t) {
        if (std::find(sample_slots.begin(), sample_slots.end(), t) !=
            sample_slots.end()) {
            std::int64_t total = 0;
            for (std::int64_t v : q) total += v;
            samples.push_back(total);
        }
        Schedule schedule = max_weight_schedule(q, n, tie_rng);
        for (std::size_t k = 0; k < q.size(); ++k)
            arrivals[k] = runners[k].emit_and_step();
        switch_step(q, arrivals, schedule, n, unused);
    }
    return samples;
}

double switch_prediction(const std::vector<double>& sigma_sq_matrix, int n) {
    CompSum s;
    for (double v : sigma_sq_matrix) {
        if (v < 0.0) throw Error("variances must be non-negative");
        s.add(v);
    }
    return (1.0 - 1.0 / (2.0 * n)) * s.value();
}

double universal_lower(const std::vector<double>& sigma_sq_matrix) {
    CompSum s;
    for (double v : sigma_sq_matrix) {
        if (v < 0.0) throw Error("variances must be non-negative");
        s.add(v);
    }
    return 0.5 * s.value();
}

double optimality_ratio(int n) { return 2.0 - 1.0 / n; }

}  // namespace htq
