#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace htq {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Oracle and identity suites for every module: exact values, envelope
/// soundness, scheduler and projection oracles, per-slot identities,
/// stability evidence. Each check is deterministic. Target runtime < 60 s.
std::vector<CheckResult> run_fast_checks();

/// The ten acceptance criteria, tolerances pinned in code. Criteria 1-8 run
/// the full-scale sweeps (2e7-slot horizons, 4 replications).
std::vector<CheckResult> run_acceptance_criteria();

/// Prints "[PASS]/[FAIL] name: detail" lines; returns the failure count.
int print_report(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace htq
