#include "lcare/artifacts.hpp"

#include <cinttypes>
#include <cstdio>

#include <json.hpp>

namespace lcare {

namespace {

using nlohmann::json;

// Shortest round-trip decimal text keeps the artifacts byte-stable.
json num(double v) { return v; }

} // namespace

std::string to_json(const CareFit& fit) {
    json j;
    j["model"] = "care";
    j["tau"] = num(fit.params.tau);
    j["alpha"] = fit.params.alpha;
    j["sigma_eps"] = num(fit.params.sigma_eps);
    j["loglik"] = num(fit.loglik);
    j["als_loss"] = num(fit.als);
    j["window"] = {{"end", fit.window_end}, {"length", fit.window_len}};
    j["converged"] = fit.converged;
    j["rank_deficient"] = fit.rank_deficient;
    j["iterations"] = fit.iterations;
    return j.dump(2) + "\n";
}

std::string to_json(const CaviarFit& fit) {
    json j;
    j["model"] = "caviar";
    j["alpha"] = num(fit.params.alpha);
    j["beta"] = fit.params.beta;
    j["tick_loss"] = num(fit.tick_loss);
    j["window"] = {{"end", fit.window_end}, {"length", fit.window_len}};
    j["converged"] = fit.converged;
    j["stationarity_penalty_active"] = fit.stationarity_penalty_active;
    return j.dump(2) + "\n";
}

std::string to_json(const RiskBound& bound) {
    json j;
    j["artifact"] = "risk_bound";
    j["scenario"] = bound.scenario;
    j["tau"] = num(bound.tau);
    j["r"] = num(bound.r);
    j["value"] = num(bound.value);
    j["n_paths"] = bound.n_paths;
    j["seed"] = bound.seed;
    j["discarded_paths"] = bound.discarded_paths;
    return j.dump(2) + "\n";
}

RiskBound risk_bound_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("artifact", "") != "risk_bound")
        throw ConfigMismatch("not a risk-bound artifact");
    RiskBound b;
    b.scenario = j.at("scenario").get<std::string>();
    b.tau = j.at("tau").get<double>();
    b.r = j.at("r").get<double>();
    b.value = j.at("value").get<double>();
    b.n_paths = j.at("n_paths").get<int>();
    b.seed = j.at("seed").get<std::uint64_t>();
    b.discarded_paths = j.value("discarded_paths", 0);
    return b;
}

std::string to_json(const CriticalValueTable& table) {
    json j;
    j["artifact"] = "critical_values";
    j["scenario"] = table.scenario;
    j["tau"] = num(table.tau);
    j["r"] = num(table.r);
    j["rho"] = num(table.rho);
    j["scheme"] = table.scheme_lengths;
    j["z"] = table.z;
    j["n_paths"] = table.n_paths;
    j["seed"] = table.seed;
    j["risk_bound"] = num(table.risk_bound);
    return j.dump(2) + "\n";
}

CriticalValueTable critical_values_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("artifact", "") != "critical_values")
        throw ConfigMismatch("not a critical-value artifact");
    CriticalValueTable t;
    t.scenario = j.at("scenario").get<std::string>();
    t.tau = j.at("tau").get<double>();
    t.r = j.at("r").get<double>();
    t.rho = j.at("rho").get<double>();
    t.scheme_lengths = j.at("scheme").get<std::vector<int>>();
    t.z = j.at("z").get<std::vector<double>>();
    t.n_paths = j.at("n_paths").get<int>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.risk_bound = j.at("risk_bound").get<double>();
    return t;
}

std::string artifact_key(double tau, double r, const std::string& scenario,
                         std::uint64_t seed, int n_paths) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "tau=%.6g|r=%.6g|scenario=%s|seed=%" PRIu64 "|paths=%d",
                  tau, r, scenario.c_str(), seed, n_paths);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001B3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016" PRIx64, h);
    return out;
}

} // namespace lcare
