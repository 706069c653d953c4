#include "htq/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "htq/errors.hpp"

namespace htq {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (model != "ssq" && model != "switch")
        throw ConfigInvalid("model: expected \"ssq\" or \"switch\"");
    if (family_kind != "two_state" && family_kind != "iid")
        throw ConfigInvalid("family.kind: expected \"two_state\" or \"iid\"");
    if (epsilons.empty()) throw ConfigInvalid("epsilons: must not be empty");
    double cap = model == "ssq" ? std::min(service_mu, 1.0) : 1.0;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0 && epsilons[i] < cap))
            throw ConfigInvalid("epsilons[" + std::to_string(i) +
                                "]: must lie in (0, min(mu,1))");
        if (i > 0 && epsilons[i] >= epsilons[i - 1])
            throw ConfigInvalid("epsilons: must be strictly decreasing");
    }
    if (replications < 1) throw ConfigInvalid("replications: must be >= 1");
    if (horizon < 1) throw ConfigInvalid("horizon: must be positive");
    if (batches < 2) throw ConfigInvalid("batches: must be >= 2");
    if (model == "switch" && n < 2) throw ConfigInvalid("n: switch needs n >= 2");
    if (model == "switch" && rate_kind == "matrix" &&
        rate_matrix.size() != static_cast<std::size_t>(n) * n)
        throw ConfigInvalid("rate_matrix: must be n x n");
    for (double th : theta_grid)
        if (th > 0.0) throw ConfigInvalid("theta_grid: thetas must be <= 0");
}

ArrivalFamily ExperimentConfig::build_family() const {
    RateMapping mapping = model == "ssq" ? RateMapping::OffsetFromCapacity
                                         : RateMapping::ScaledToTarget;
    double tgt = model == "ssq" ? service_mu : target;
    if (family_kind == "two_state")
        return make_two_state_family(peak, burstiness, tgt, mapping);
    return make_iid_family(iid_values, iid_probs, tgt, mapping);
}

ServiceDistribution ExperimentConfig::build_service() const {
    if (service_kind == "bernoulli") return ServiceDistribution::bernoulli(service_mu);
    if (service_kind == "table")
        return ServiceDistribution::table(service_values, service_probs);
    throw ConfigInvalid("service.kind: expected \"bernoulli\" or \"table\"");
}

std::vector<double> ExperimentConfig::build_rate_matrix() const {
    if (rate_kind == "uniform") return saturated_rate_matrix_uniform(n);
    if (rate_kind == "random") return saturated_rate_matrix_random(n, rate_seed);
    if (rate_kind == "matrix") return rate_matrix;
    throw ConfigInvalid("rate.kind: expected \"uniform\", \"random\" or \"matrix\"");
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigInvalid(std::string(key) + ": " + e.what());
        }
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig c;
    read(j, "model", c.model);
    read(j, "epsilons", c.epsilons);
    read(j, "horizon", c.horizon);
    read(j, "burn_in", c.burn_in);
    read(j, "replications", c.replications);
    read(j, "seed", c.seed);
    read(j, "theta_grid", c.theta_grid);
    read(j, "batches", c.batches);
    read(j, "out", c.out);
    read(j, "n", c.n);

    if (j.contains("family")) {
        const json& f = j.at("family");
        if (!f.is_object()) throw ConfigInvalid("family: expected an object");
        read(f, "kind", c.family_kind);
        read(f, "peak", c.peak);
        read(f, "burstiness", c.burstiness);
        read(f, "values", c.iid_values);
        read(f, "probs", c.iid_probs);
        read(f, "epsilons", c.epsilons);
        if (f.contains("target")) {
            const json& t = f.at("target");
            if (t.is_number()) {
                c.target = t.get<double>();
            } else if (t.is_string()) {
                std::string s = t.get<std::string>();
                if (s != "uniform")
                    throw ConfigInvalid("family.target: unknown preset \"" + s + "\"");
                c.rate_kind = "uniform";
            } else if (t.is_array()) {
                c.rate_kind = "matrix";
                c.rate_matrix.clear();
                for (const auto& row : t)
                    for (const auto& v : row) c.rate_matrix.push_back(v.get<double>());
            } else if (t.is_object()) {
                std::string kind = t.value("kind", "");
                if (kind != "random")
                    throw ConfigInvalid("family.target: unknown matrix spec");
                c.rate_kind = "random";
                c.rate_seed = t.value("seed", std::uint64_t{1});
            }
        }
    }
    if (j.contains("service")) {
        const json& s = j.at("service");
        read(s, "kind", c.service_kind);
        read(s, "mu", c.service_mu);
        read(s, "values", c.service_values);
        read(s, "probs", c.service_probs);
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const {
    json f{{"kind", family_kind}};
    if (family_kind == "two_state") {
        f["peak"] = peak;
        f["burstiness"] = burstiness;
    } else {
        f["values"] = iid_values;
        f["probs"] = iid_probs;
    }
    if (model == "ssq") {
        f["target"] = service_mu;
    } else if (rate_kind == "uniform") {
        f["target"] = "uniform";
    } else if (rate_kind == "random") {
        f["target"] = json{{"kind", "random"}, {"seed", rate_seed}};
    } else {
        json rows = json::array();
        for (int i = 0; i < n; ++i) {
            json row = json::array();
            for (int jj = 0; jj < n; ++jj)
                row.push_back(rate_matrix[static_cast<std::size_t>(i) * n + jj]);
            rows.push_back(row);
        }
        f["target"] = rows;
    }

    json j{{"model", model},
           {"family", f},
           {"epsilons", epsilons},
           {"horizon", horizon},
           {"burn_in", burn_in},
           {"replications", replications},
           {"seed", seed},
           {"batches", batches},
           {"out", out}};
    if (model == "ssq") {
        json s{{"kind", service_kind}};
        if (service_kind == "bernoulli") {
            s["mu"] = service_mu;
        } else {
            s["values"] = service_values;
            s["probs"] = service_probs;
        }
        j["service"] = s;
        j["theta_grid"] = theta_grid;
    } else {
        j["n"] = n;
    }
    return j.dump(2) + "\n";
}

}  // namespace htq
