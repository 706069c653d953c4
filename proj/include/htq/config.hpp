#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htq/arrival.hpp"
#include "htq/ssq.hpp"

namespace htq {

/// One config document drives a whole sweep. Defaults are what
/// `print-config` shows; anything absent in the parsed JSON keeps them.
struct ExperimentConfig {
    std::string model = "ssq";  // "ssq" | "switch"

    // family
    std::string family_kind = "two_state";  // "two_state" | "iid"
    int peak = 2;
    double burstiness = 0.4;
    double target = 0.5;                 // mu for ssq, ignored for switch targets
    std::vector<int> iid_values;         // iid kind
    std::vector<double> iid_probs;

    // ssq service
    std::string service_kind = "bernoulli";  // "bernoulli" | "table"
    double service_mu = 0.5;
    std::vector<int> service_values;
    std::vector<double> service_probs;

    // switch
    int n = 2;
    std::string rate_kind = "uniform";  // "uniform" | "random" | "matrix"
    std::uint64_t rate_seed = 1;
    std::vector<double> rate_matrix;    // rate_kind == "matrix"

    std::vector<double> epsilons = {0.2, 0.1, 0.05, 0.02, 0.01};
    std::int64_t horizon = 2000000;
    std::int64_t burn_in = -1;  // -1: max(10/eps^2, 1e5)
    int replications = 4;
    std::uint64_t seed = 20240601;
    std::vector<double> theta_grid = {-0.5, -1.0, -2.0};
    int batches = 30;
    std::string out = "sweep.csv";

    void validate() const;                       // throws ConfigInvalid
    ArrivalFamily build_family() const;          // mapping chosen by model
    ServiceDistribution build_service() const;
    std::vector<double> build_rate_matrix() const;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
    std::string to_json_text() const;
};

}  // namespace htq
