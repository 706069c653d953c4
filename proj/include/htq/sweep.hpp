#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "htq/config.hpp"
#include "htq/ssq.hpp"
#include "htq/switch_sim.hpp"

namespace htq {

/// Worker count: HTQ_THREADS if set, otherwise the hardware concurrency.
int worker_count();

/// Runs fn(job) for job = 0..jobs-1 on a worker pool. Exceptions are
/// rethrown on the caller thread, lowest job index first.
void parallel_jobs(int jobs, const std::function<void(int)>& fn);

struct SsqSweepRow {
    double epsilon = 0.0;
    int m_window = 0;        // floor(1/sqrt(eps)), the bound window
    double mean_q = 0.0;
    double scaled_mean_q = 0.0;
    double ci = 0.0;         // across replications, 95%
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double prediction = 0.0;
    double mean_unused = 0.0;
    std::vector<double> mgf;          // per theta
    std::vector<double> laplace;      // per theta
    std::uint64_t seed = 0;
    std::int64_t slots = 0;

    std::vector<SsqStats> rep_stats;  // not in the CSV
};

struct SsqSweepResult {
    std::vector<double> thetas;
    std::vector<SsqSweepRow> rows;
    double extrapolated_ratio = 0.0;  // linear-in-sqrt(eps) intercept
    std::vector<std::string> warnings;
};

struct SwitchSweepRow {
    double epsilon = 0.0;
    int n = 0;
    double scaled_sum_q = 0.0;
    double ci = 0.0;
    double prediction = 0.0;
    double universal_lower = 0.0;
    double perp_k_sq = 0.0;
    double perp_l_sq = 0.0;
    double parallel_k_sq = 0.0;
    double sum_unused = 0.0;
    std::uint64_t seed = 0;
    std::int64_t slots = 0;

    std::vector<SwitchStats> rep_stats;
};

struct SwitchSweepResult {
    std::vector<SwitchSweepRow> rows;
    double extrapolated_ratio = 0.0;
    std::vector<std::string> warnings;
};

SsqSweepResult run_ssq_sweep(const ExperimentConfig& config);
SwitchSweepResult run_switch_sweep(const ExperimentConfig& config);

std::string ssq_csv(const SsqSweepResult& result);
std::string switch_csv(const SwitchSweepResult& result);

std::string ssq_summary(const SsqSweepResult& result);
std::string switch_summary(const SwitchSweepResult& result);

/// Full pipeline per the config's model: sweep, CSV to config.out, summary
/// table to stdout. Deterministic for a fixed config.
void run_sweep(const ExperimentConfig& config);

/// Intercept of the least-squares line ratio ~ a + b sqrt(eps) over the
/// smallest three grid points (all, if fewer).
double extrapolate_ratio(const std::vector<double>& epsilons,
                         const std::vector<double>& ratios);

}  // namespace htq
