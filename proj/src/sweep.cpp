#include "htq/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "htq/errors.hpp"

namespace htq {

int worker_count() {
    if (const char* env = std::getenv("HTQ_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_jobs(int jobs, const std::function<void(int)>& fn) {
    int workers = std::min(worker_count(), jobs);
    if (workers <= 1) {
        for (int j = 0; j < jobs; ++j) fn(j);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int j = next.fetch_add(1);
                if (j >= jobs) return;
                try {
                    fn(j);
                } catch (...) {
                    errors[j] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double extrapolate_ratio(const std::vector<double>& epsilons,
                         const std::vector<double>& ratios) {
    std::size_t k = std::min<std::size_t>(3, epsilons.size());
    if (k < 2) return ratios.empty() ? 0.0 : ratios.back();
    std::vector<double> x, y;
    for (std::size_t i = epsilons.size() - k; i < epsilons.size(); ++i) {
        x.push_back(std::sqrt(epsilons[i]));
        y.push_back(ratios[i]);
    }
    return fit_line(x, y).first;
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "na";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_theta(double th) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", th);
    return buf;
}

void check_monotone_deviation(const std::vector<double>& eps,
                              const std::vector<double>& dev,
                              const std::vector<double>& ci,
                              std::vector<std::string>& warnings) {
    for (std::size_t i = 1; i < dev.size(); ++i) {
        double slack = (std::isnan(ci[i - 1]) ? 0.0 : ci[i - 1]) +
                       (std::isnan(ci[i]) ? 0.0 : ci[i]);
        if (dev[i] > dev[i - 1] + slack) {
            std::ostringstream os;
            os << "deviation from prediction grew from eps=" << eps[i - 1]
               << " to eps=" << eps[i] << " (" << dev[i - 1] << " -> " << dev[i]
               << ", beyond CI overlap)";
            warnings.push_back(os.str());
        }
    }
}

}  // namespace

SsqSweepResult run_ssq_sweep(const ExperimentConfig& config) {
    config.validate();
    if (config.model != "ssq") throw ConfigInvalid("run_ssq_sweep: model is not ssq");

    ArrivalFamily family = config.build_family();
    ServiceDistribution service = config.build_service();
    const double mu = config.service_mu;
    const double sigma_s_sq = service.variance();
    const double sigma_a_sq = family.sigma_a_sq_limit();
    const double prediction = heavy_traffic_mean(sigma_a_sq, sigma_s_sq);

    const int n_eps = static_cast<int>(config.epsilons.size());
    const int reps = config.replications;
    std::vector<SsqStats> all_stats(static_cast<std::size_t>(n_eps) * reps);

    parallel_jobs(n_eps * reps, [&](int job) {
        int ei = job / reps;
        int rep = job % reps;
        SsqConfig sc;
        sc.family = family;
        sc.eps = config.epsilons[ei];
        sc.service = service;
        sc.mu = mu;
        sc.horizon = config.horizon;
        sc.burn_in = config.burn_in;
        sc.seed = derive_seed(config.seed, 101, ei, rep);
        sc.theta_grid = config.theta_grid;
        sc.batches = config.batches;
        all_stats[job] = simulate_ssq(sc);
    });

    SsqSweepResult result;
    result.thetas = config.theta_grid;
    std::vector<double> ratios, devs, cis;
    for (int ei = 0; ei < n_eps; ++ei) {
        double eps = config.epsilons[ei];
        SsqSweepRow row;
        row.epsilon = eps;
        row.m_window = std::max(1, static_cast<int>(std::floor(1.0 / std::sqrt(eps))));
        row.seed = derive_seed(config.seed, 101, ei, 0);
        row.prediction = prediction;

        std::vector<double> scaled, meanq, unused;
        for (int rep = 0; rep < reps; ++rep) {
            const auto& st = all_stats[static_cast<std::size_t>(ei) * reps + rep];
            scaled.push_back(st.scaled_mean_q);
            meanq.push_back(st.mean_q.mean);
            unused.push_back(st.mean_unused.mean);
            row.rep_stats.push_back(st);
        }
        Estimate agg = across_replications(scaled);
        row.scaled_mean_q = agg.mean;
        row.ci = agg.ci_halfwidth;
        row.mean_q = across_replications(meanq).mean;
        row.mean_unused = across_replications(unused).mean;
        row.slots = row.rep_stats.front().recorded_slots;

        for (std::size_t k = 0; k < config.theta_grid.size(); ++k) {
            std::vector<double> vals;
            for (const auto& st : row.rep_stats) vals.push_back(st.mgf[k].second.mean);
            row.mgf.push_back(across_replications(vals).mean);
            row.laplace.push_back(
                laplace_prediction(config.theta_grid[k], sigma_a_sq, sigma_s_sq));
        }

        // Pre-limit bounds from the eps-indexed process itself.
        FiniteMarkovChain chain = family.chain(eps);
        auto gammas = gamma_prefix(chain, row.m_window);
        MixingEnvelope env = fit_mixing_envelope(mixing_profile(chain, 40));
        auto stat = stationary_distribution(chain);
        PrelimitBounds pb =
            prelimit_bounds(eps, row.m_window, gammas, sigma_s_sq, family.a_max(),
                            service.s_max(), stat.mean_emission, env);
        row.lower_bound = pb.lower;
        row.upper_bound = pb.upper;

        ratios.push_back(row.scaled_mean_q / prediction);
        devs.push_back(std::abs(row.scaled_mean_q - prediction));
        cis.push_back(row.ci);
        result.rows.push_back(std::move(row));
    }

    result.extrapolated_ratio = extrapolate_ratio(config.epsilons, ratios);
    check_monotone_deviation(config.epsilons, devs, cis, result.warnings);
    return result;
}

SwitchSweepResult run_switch_sweep(const ExperimentConfig& config) {
    config.validate();
    if (config.model != "switch")
        throw ConfigInvalid("run_switch_sweep: model is not switch");

    ArrivalFamily family = config.build_family();
    const int n = config.n;
    std::vector<double> v = config.build_rate_matrix();

    std::vector<double> sigma_sq(v.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        sigma_sq[k] = family.with_target(v[k]).sigma_a_sq_limit();
    const double prediction = switch_prediction(sigma_sq, n);
    const double lower = universal_lower(sigma_sq);

    const int n_eps = static_cast<int>(config.epsilons.size());
    const int reps = config.replications;
    std::vector<SwitchStats> all_stats(static_cast<std::size_t>(n_eps) * reps);

    parallel_jobs(n_eps * reps, [&](int job) {
        int ei = job / reps;
        int rep = job % reps;
        double eps = config.epsilons[ei];
        SwitchModel model = SwitchModel::build(family, v, n, eps);
        all_stats[job] =
            simulate_switch(model, config.horizon, config.burn_in,
                            derive_seed(config.seed, 202, ei, rep), config.batches);
    });

    SwitchSweepResult result;
    std::vector<double> ratios, devs, cis;
    for (int ei = 0; ei < n_eps; ++ei) {
        SwitchSweepRow row;
        row.epsilon = config.epsilons[ei];
        row.n = n;
        row.seed = derive_seed(config.seed, 202, ei, 0);
        row.prediction = prediction;
        row.universal_lower = lower;

        std::vector<double> scaled, perpk, perpl, park, sumu;
        for (int rep = 0; rep < reps; ++rep) {
            const auto& st = all_stats[static_cast<std::size_t>(ei) * reps + rep];
            scaled.push_back(st.scaled_sum_q);
            perpk.push_back(st.perp_k_sq.mean);
            perpl.push_back(st.perp_l_sq.mean);
            park.push_back(st.parallel_k_sq.mean);
            sumu.push_back(st.sum_unused.mean);
            for (const auto& w : st.warnings) {
                if (rep == 0 &&
                    std::find(result.warnings.begin(), result.warnings.end(), w) ==
                        result.warnings.end())
                    result.warnings.push_back(w);
            }
            row.rep_stats.push_back(st);
        }
        Estimate agg = across_replications(scaled);
        row.scaled_sum_q = agg.mean;
        row.ci = agg.ci_halfwidth;
        row.perp_k_sq = across_replications(perpk).mean;
        row.perp_l_sq = across_replications(perpl).mean;
        row.parallel_k_sq = across_replications(park).mean;
        row.sum_unused = across_replications(sumu).mean;
        row.slots = row.rep_stats.front().recorded_slots;

        ratios.push_back(row.scaled_sum_q / prediction);
        devs.push_back(std::abs(row.scaled_sum_q - prediction));
        cis.push_back(row.ci);
        result.rows.push_back(std::move(row));
    }

    result.extrapolated_ratio = extrapolate_ratio(config.epsilons, ratios);
    check_monotone_deviation(config.epsilons, devs, cis, result.warnings);
    return result;
}

std::string ssq_csv(const SsqSweepResult& result) {
    std::ostringstream os;
    os << "epsilon,m_window,mean_q,scaled_mean_q,ci,lower_bound,upper_bound,"
          "prediction,mean_unused";
    for (double th : result.thetas) os << ",mgf_theta_" << fmt_theta(th);
    for (double th : result.thetas) os << ",laplace_pred_" << fmt_theta(th);
    os << ",seed,slots\n";
    for (const auto& r : result.rows) {
        os << fmt(r.epsilon) << ',' << r.m_window << ',' << fmt(r.mean_q) << ','
           << fmt(r.scaled_mean_q) << ',' << fmt(r.ci) << ',' << fmt(r.lower_bound)
           << ',' << fmt(r.upper_bound) << ',' << fmt(r.prediction) << ','
           << fmt(r.mean_unused);
        for (double v : r.mgf) os << ',' << fmt(v);
        for (double v : r.laplace) os << ',' << fmt(v);
        os << ',' << r.seed << ',' << r.slots << '\n';
    }
    return os.str();
}

std::string switch_csv(const SwitchSweepResult& result) {
    std::ostringstream os;
    os << "epsilon,n,scaled_sum_q,ci,prediction,universal_lower,perp_k_sq,"
          "perp_l_sq,parallel_k_sq,sum_unused,seed,slots\n";
    for (const auto& r : result.rows) {
        os << fmt(r.epsilon) << ',' << r.n << ',' << fmt(r.scaled_sum_q) << ','
           << fmt(r.ci) << ',' << fmt(r.prediction) << ',' << fmt(r.universal_lower)
           << ',' << fmt(r.perp_k_sq) << ',' << fmt(r.perp_l_sq) << ','
           << fmt(r.parallel_k_sq) << ',' << fmt(r.sum_unused) << ',' << r.seed
           << ',' << r.slots << '\n';
    }
    return os.str();
}

std::string ssq_summary(const SsqSweepResult& result) {
    std::ostringstream os;
    os << "eps        scaled_mean_q  ci          ratio      [lower, upper]\n";
    for (const auto& r : result.rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-10g %-14.6g %-11.4g %-10.5g [%.5g, %.5g]\n",
                      r.epsilon, r.scaled_mean_q, r.ci,
                      r.scaled_mean_q / r.prediction, r.lower_bound, r.upper_bound);
        os << line;
    }
    os << "prediction (sigma_a^2 + sigma_s^2)/2 = " << fmt(result.rows.front().prediction)
       << "\n";
    os << "extrapolated ratio at eps -> 0: " << fmt(result.extrapolated_ratio) << "\n";
    for (const auto& w : result.warnings) os << "warning: " << w << "\n";
    return os.str();
}

std::string switch_summary(const SwitchSweepResult& result) {
    std::ostringstream os;
    os << "eps        scaled_sum_q   ci          ratio      perp_k_sq   parallel_k_sq\n";
    for (const auto& r : result.rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-10g %-14.6g %-11.4g %-10.5g %-11.5g %-13.6g\n",
                      r.epsilon, r.scaled_sum_q, r.ci, r.scaled_sum_q / r.prediction,
                      r.perp_k_sq, r.parallel_k_sq);
        os << line;
    }
    const auto& front = result.rows.front();
    os << "prediction (1 - 1/2N)||sigma||^2 = " << fmt(front.prediction)
       << ", universal lower ||sigma||^2/2 = " << fmt(front.universal_lower)
       << " (ratio " << fmt(optimality_ratio(front.n)) << ")\n";
    os << "extrapolated ratio at eps -> 0: " << fmt(result.extrapolated_ratio) << "\n";
    for (const auto& w : result.warnings) os << "warning: " << w << "\n";
    return os.str();
}

void run_sweep(const ExperimentConfig& config) {
    config.validate();
    std::string csv, summary;
    if (config.model == "ssq") {
        auto result = run_ssq_sweep(config);
        csv = ssq_csv(result);
        summary = ssq_summary(result);
    } else {
        auto result = run_switch_sweep(config);
        csv = switch_csv(result);
        summary = switch_summary(result);
    }
    std::ofstream out(config.out, std::ios::binary);
    if (!out) throw IoError("cannot write output file: " + config.out);
    out << csv;
    out.close();
    std::cout << summary;
}

}  // namespace htq
