#include "htq/ssq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "htq/errors.hpp"
#include "htq/numeric.hpp"

namespace htq {

double ServiceDistribution::mean() const {
    CompSum s;
    for (std::size_t v = 0; v < probs.size(); ++v) s.add(probs[v] * v);
    return s.value();
}

double ServiceDistribution::variance() const {
    double m = mean();
    CompSum s;
    for (std::size_t v = 0; v < probs.size(); ++v)
        s.add(probs[v] * (v - m) * (v - m));
    return s.value();
}

ServiceDistribution ServiceDistribution::bernoulli(double mu) {
    if (!(mu > 0.0 && mu <= 1.0))
        throw ConfigInvalid("bernoulli service needs mu in (0,1]");
    return ServiceDistribution{{1.0 - mu, mu}};
}

ServiceDistribution ServiceDistribution::table(
    const std::vector<int>& values, const std::vector<double>& probabilities) {
    if (values.empty() || values.size() != probabilities.size())
        throw ConfigInvalid("service table: values/probs mismatch");
    int smax = *std::max_element(values.begin(), values.end());
    if (smax < 0 || *std::min_element(values.begin(), values.end()) < 0)
        throw ConfigInvalid("service table: negative value");
    ServiceDistribution d;
    d.probs.assign(static_cast<std::size_t>(smax) + 1, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (probabilities[i] < 0.0)
            throw ConfigInvalid("service table: negative probability");
        d.probs[values[i]] += probabilities[i];
        total += probabilities[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ConfigInvalid("service table: probabilities do not sum to 1");
    return d;
}

std::int64_t SsqConfig::effective_burn_in() const {
    if (burn_in >= 0) return burn_in;
    auto b = static_cast<std::int64_t>(10.0 / (eps * eps));
    return std::max<std::int64_t>(b, 100000);
}

void SsqConfig::validate() const {
    if (!(eps > 0.0 && eps < mu))
        throw ConfigInvalid("ssq: need 0 < eps < mu");
    if (std::abs(service.mean() - mu) > 1e-12)
        throw ConfigInvalid("ssq: service mean " + std::to_string(service.mean()) +
                            " does not match declared mu " + std::to_string(mu));
    if (horizon < 1) throw ConfigInvalid("ssq: horizon must be positive");
    if (effective_burn_in() >= horizon)
        throw ConfigInvalid("ssq: burn-in must be smaller than the horizon");
    for (double th : theta_grid)
        if (th > 0.0) throw ConfigInvalid("ssq: MGF thetas must be <= 0");
}

namespace {

// exp(eps*theta*q) evaluated through an incrementally extended power table;
// q is a small integer so this replaces an exp() per slot by a lookup.
class ExpTable {
   public:
    explicit ExpTable(double log_base) : base_(std::exp(log_base)) {
        values_.push_back(1.0);
    }
    double at(std::int64_t q) {
        auto idx = static_cast<std::size_t>(q);
        while (values_.size() <= idx) values_.push_back(values_.back() * base_);
        return values_[idx];
    }

   private:
    double base_;
    std::vector<double> values_;
};

}  // namespace

SsqStats simulate_ssq(const SsqConfig& config) {
    config.validate();
    const std::int64_t burn = config.effective_burn_in();
    const std::int64_t recorded = config.horizon - burn;

    FiniteMarkovChain chain = config.family.chain(config.eps);
    auto stat = stationary_distribution(chain);

    Rng init_rng(derive_seed(config.seed, 1));
    Rng chain_rng(derive_seed(config.seed, 2));
    Rng service_rng(derive_seed(config.seed, 3));

    int x = draw_from(stat.probabilities, init_rng);
    std::int64_t q = 0;

    const int n_theta = static_cast<int>(config.theta_grid.size());
    std::vector<ExpTable> exp_tables;
    exp_tables.reserve(n_theta);
    for (double th : config.theta_grid) exp_tables.emplace_back(config.eps * th);

    BatchMeans q_batches(recorded, config.batches);
    BatchMeans u_batches(recorded, config.batches);
    std::vector<BatchMeans> mgf_batches(n_theta, BatchMeans(recorded, config.batches));
    const std::int64_t record_end = burn + q_batches.used_slots();

    const std::int64_t quarter = config.horizon / 4;
    std::array<std::int64_t, 4> quarter_sums{};

    const auto& service_probs = config.service.probs;
    const int smax = config.service.s_max();

    for (std::int64_t t = 0; t < config.horizon; ++t) {
        if (t >= burn && t < record_end) {
            q_batches.add(static_cast<double>(q));
            for (int k = 0; k < n_theta; ++k)
                mgf_batches[k].add(exp_tables[k].at(q));
        }
        if (quarter > 0) {
            auto qi = std::min<std::int64_t>(t / quarter, 3);
            quarter_sums[qi] += q;
        }

        std::int64_t a = chain.emission(x);
        std::int64_t s;
        {
            double u = service_rng.u01();
            double acc = 0.0;
            int v = 0;
            for (; v < smax; ++v) {
                acc += service_probs[v];
                if (u < acc) break;
            }
            s = v;
        }
        auto [q_next, unused] = ssq_step(q, a, s);
        if (q_next * unused != 0 || unused > s)
            throw Error("ssq slot identity violated");  // unreachable by construction
        if (t >= burn && t < record_end)
            u_batches.add(static_cast<double>(unused));
        q = q_next;
        x = chain_step(chain, x, chain_rng);
    }

    SsqStats out;
    out.mean_q = q_batches.estimate();
    out.scaled_mean_q = config.eps * out.mean_q.mean;
    out.mean_unused = u_batches.estimate();
    out.recorded_slots = q_batches.used_slots();
    for (int k = 0; k < n_theta; ++k)
        out.mgf.emplace_back(config.theta_grid[k], mgf_batches[k].estimate());

    double u_se = out.mean_unused.ci_halfwidth / t_quantile_975(config.batches - 1);
    out.unused_identity_ok =
        std::abs(out.mean_unused.mean - config.eps) <= 4.0 * u_se;

    for (int i = 0; i < 4; ++i)
        out.quarter_means[i] =
            quarter > 0 ? static_cast<double>(quarter_sums[i]) / quarter : 0.0;
    bool growing = out.quarter_means[1] > out.quarter_means[0] &&
                   out.quarter_means[2] > out.quarter_means[1] &&
                   out.quarter_means[3] > out.quarter_means[2];
    if (growing && out.quarter_means[3] > 4.0 * out.quarter_means[0] + 20.0)
        throw UnstableRun("ssq: queue grows across all quarters (" +
                          std::to_string(out.quarter_means[0]) + " -> " +
                          std::to_string(out.quarter_means[3]) + ")");
    return out;
}

double heavy_traffic_mean(double sigma_a_sq, double sigma_s_sq) {
    if (sigma_a_sq < 0.0 || sigma_s_sq < 0.0)
        throw Error("variances must be non-negative");
    return 0.5 * (sigma_a_sq + sigma_s_sq);
}

int window_m(double eps, int a_max, const MixingEnvelope& envelope) {
    if (eps <= 0.0) throw Error("window_m needs eps > 0");
    if (envelope.exact_mixing) return 1;
    double c = envelope.c_const;
    double alpha = envelope.alpha;
    for (int m = 1;; ++m) {
        double lhs = 2.0 * a_max * c * (1.0 - std::pow(alpha, m)) / (1.0 - alpha);
        if (lhs < 0.5 * m * eps) return m;
        if (m > 100000000)
            throw Error("window_m failed to terminate");  // cannot happen: rhs grows
    }
}

PrelimitBounds prelimit_bounds(double eps, int m,
                               const std::vector<double>& gamma_prefix,
                               double sigma_s_sq, int a_max, int s_max,
                               double lambda, const MixingEnvelope& envelope) {
    if (m < 1) throw Error("prelimit_bounds needs m >= 1");
    if (gamma_prefix.size() < static_cast<std::size_t>(m) + 1)
        throw Error("prelimit_bounds needs gamma(0..m)");

    CompSum gsum;
    gsum.add(gamma_prefix[0]);
    for (int i = 1; i <= m; ++i) gsum.add(2.0 * gamma_prefix[i]);
    double gamma_part = gsum.value();

    double mix = envelope.exact_mixing
                     ? 0.0
                     : 2.0 * a_max * envelope.c_const * std::pow(envelope.alpha, m) / eps;
    double drift_slack = 2.0 * m * (a_max + lambda) * eps;

    PrelimitBounds out;
    double lower_num = gamma_part + sigma_s_sq - drift_slack - s_max * eps + eps * eps;
    out.lower = std::max(0.0, lower_num / (2.0 * (1.0 + mix)));

    if (1.0 - mix <= 0.0) {
        out.upper = std::numeric_limits<double>::infinity();
        out.upper_vacuous = true;
    } else {
        out.upper = (gamma_part + sigma_s_sq + drift_slack + eps * eps) /
                    (2.0 * (1.0 - mix));
    }
    return out;
}

double laplace_prediction(double theta, double sigma_a_sq, double sigma_s_sq) {
    if (theta > 0.0) throw Error("laplace_prediction needs theta <= 0");
    return 1.0 / (1.0 - theta * heavy_traffic_mean(sigma_a_sq, sigma_s_sq));
}

}  // namespace htq
