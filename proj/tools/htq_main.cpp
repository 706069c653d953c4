#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "htq/config.hpp"
#include "htq/errors.hpp"
#include "htq/markov.hpp"
#include "htq/sweep.hpp"
#include "htq/verify.hpp"
#include <json.hpp>

namespace {

htq::FiniteMarkovChain load_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw htq::IoError("cannot open chain file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw htq::ConfigInvalid(std::string("chain file is not valid JSON: ") +
                                 e.what());
    }
    try {
        return htq::build_chain(j.at("states").get<std::vector<std::string>>(),
                                j.at("transition")
                                    .get<std::vector<std::vector<double>>>(),
                                j.at("emission").get<std::vector<int>>());
    } catch (const nlohmann::json::exception& e) {
        throw htq::ConfigInvalid(std::string("chain file schema: ") + e.what());
    }
}

int analyze_chain(const std::string& path, int m_max, int t_max, double tail_tol) {
    auto chain = load_chain(path);
    auto stat = htq::stationary_distribution(chain);

    std::cout << "states: " << chain.size() << ", A_max: " << chain.a_max() << "\n";
    std::cout << "pi:";
    for (int i = 0; i < chain.size(); ++i)
        std::cout << ' ' << chain.states()[i] << '=' << stat.probabilities[i];
    std::cout << "\nlambda: " << stat.mean_emission << "\n";

    auto profile = htq::mixing_profile(chain, m_max);
    auto env = htq::fit_mixing_envelope(profile);
    std::cout << "envelope: C=" << env.c_const << ", alpha=" << env.alpha
              << (env.exact_mixing ? " (exact mixing)" : "") << "\n";

    auto summary = htq::autocovariance(chain, t_max, tail_tol);
    std::cout << "sigma_sq: " << summary.sigma_sq
              << " (truncation tail bound " << summary.truncation_tail << ")\n";

    std::cout << "\nt,gamma_t\n";
    for (std::size_t t = 0; t < summary.gamma.size(); ++t)
        std::cout << t << ',' << summary.gamma[t] << '\n';

    std::cout << "\nm,tv,envelope\n";
    for (int m = 1; m <= m_max; ++m)
        std::cout << m << ',' << profile[m - 1] << ',' << env.bound(m) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heavy-traffic queueing toolkit: single-server and MaxWeight "
                 "switch sweeps under Markov-modulated arrivals"};
    app.require_subcommand(0, 1);

    bool print_config = false;
    app.add_flag("--print-config", print_config,
                 "print the default config documents and exit");

    auto* analyze = app.add_subcommand("analyze-chain",
                                       "stationary analysis of a chain JSON file");
    std::string chain_path;
    int m_max = 50, t_max = 256;
    double tail_tol = 1e-9;
    analyze->add_option("chain", chain_path, "chain definition JSON")->required();
    analyze->add_option("--m-max", m_max, "mixing profile horizon");
    analyze->add_option("--t-max", t_max, "autocovariance lag cap");
    analyze->add_option("--tail-tol", tail_tol, "sigma^2 truncation tolerance");

    std::string ssq_config_path, ssq_out;
    auto* ssq = app.add_subcommand("ssq-sweep", "single-server queue eps-sweep");
    ssq->add_option("--config", ssq_config_path, "experiment config JSON")->required();
    ssq->add_option("--out", ssq_out, "output CSV path (overrides config)");

    std::string sw_config_path, sw_out;
    auto* sw = app.add_subcommand("switch-sweep", "input-queued switch eps-sweep");
    sw->add_option("--config", sw_config_path, "experiment config JSON")->required();
    sw->add_option("--out", sw_out, "output CSV path (overrides config)");

    auto* verify = app.add_subcommand("verify", "run the invariant suites");
    bool full = false;
    verify->add_flag("--full", full, "add the simulation acceptance criteria");

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_config) {
            htq::ExperimentConfig ssq_default;
            std::cout << ssq_default.to_json_text();
            htq::ExperimentConfig sw_default;
            sw_default.model = "switch";
            sw_default.out = "switch.csv";
            std::cout << sw_default.to_json_text();
            return 0;
        }
        if (analyze->parsed())
            return analyze_chain(chain_path, m_max, t_max, tail_tol);
        if (ssq->parsed()) {
            auto config = htq::ExperimentConfig::from_file(ssq_config_path);
            if (config.model != "ssq")
                throw htq::ConfigInvalid("ssq-sweep: config model is not \"ssq\"");
            if (!ssq_out.empty()) config.out = ssq_out;
            htq::run_sweep(config);
            return 0;
        }
        if (sw->parsed()) {
            auto config = htq::ExperimentConfig::from_file(sw_config_path);
            if (config.model != "switch")
                throw htq::ConfigInvalid("switch-sweep: config model is not \"switch\"");
            if (!sw_out.empty()) config.out = sw_out;
            htq::run_sweep(config);
            return 0;
        }
        if (verify->parsed()) {
            auto results = htq::run_fast_checks();
            if (full) {
                auto acc = htq::run_acceptance_criteria();
                results.insert(results.end(), acc.begin(), acc.end());
            }
            int failures = htq::print_report(results, std::cout);
            return failures == 0 ? 0 : 1;
        }
        std::cout << app.help();
        return 0;
    } catch (const htq::ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const htq::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
