// lcare command line: summarize, calibrate, adapt, fit, backtest, report.
// Exit codes: 0 success, 1 numerical failure, 2 usage or config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lcare/artifacts.hpp"
#include "lcare/backtest.hpp"
#include "lcare/care.hpp"
#include "lcare/caviar.hpp"
#include "lcare/lpa.hpp"
#include "lcare/market_data.hpp"
#include "lcare/risk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : lcare::Error {
    using Error::Error;
};

lcare::ReturnSeries load_returns(const std::string& path, const lcare::CsvSpec& spec,
                                 lcare::ReturnKind kind) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open input file: " + path);
    return lcare::to_returns(lcare::load_prices(in, spec), kind);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lcare::Error("cannot write file: " + path.string());
    out << text;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw lcare::Error("cannot write file: " + path);
    return file;
}

/// The resolved configuration of every run goes to stderr, and into the
/// artifact directory when one is in play.
void emit_config(const json& cfg, const std::string& artifacts_dir) {
    std::cerr << "config " << cfg.dump() << "\n";
    if (!artifacts_dir.empty()) {
        std::string key = lcare::artifact_key(cfg.value("tau", 0.0), cfg.value("r", 0.0),
                                              cfg.value("command", "?"),
                                              cfg.value("seed", std::uint64_t{0}),
                                              cfg.value("paths", 0));
        write_file(fs::path(artifacts_dir) / ("config_" + cfg.value("command", "cmd") + "_" + key + ".json"),
                   cfg.dump(2) + "\n");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

lcare::CareParams scenario_params(const std::string& scenario_file, const std::string& label,
                                  double tau, const lcare::ReturnSeries* returns,
                                  std::string& resolved_label) {
    const auto scenarios = lcare::ScenarioSet::builtin();
    if (!scenario_file.empty()) {
        json j = json::parse(read_file(scenario_file));
        lcare::CareParams p;
        auto a = j.at("alpha").get<std::vector<double>>();
        if (a.size() != 8) throw UsageError("scenario file: alpha must have 8 entries");
        std::copy(a.begin(), a.end(), p.alpha.begin());
        p.sigma_eps = j.at("sigma_eps").get<double>();
        p.tau = tau;
        p.validate();
        resolved_label = j.value("label", std::string("custom"));
        return p;
    }
    if (label == "auto") {
        if (!returns)
            throw UsageError("--scenario auto requires --input to derive the trailing fit");
        auto y = std::span<const double>(returns->values());
        resolved_label = lcare::select_scenario(y, static_cast<int>(y.size()) - 1, tau, scenarios);
        return scenarios.get(tau, resolved_label).params;
    }
    resolved_label = label;
    return scenarios.get(tau, label).params;
}

// ---------------------------------------------------------------- summarize

int cmd_summarize(const std::string& input, const lcare::CsvSpec& spec, const std::string& kind,
                  const std::string& format, const std::string& output) {
    auto returns = load_returns(input, spec, lcare::parse_return_kind(kind));
    auto stats = lcare::summarize(returns);

    json cfg{{"command", "summarize"}, {"input", input},     {"date_col", spec.date_col},
             {"price_col", spec.price_col}, {"return_kind", kind}, {"format", format}};
    emit_config(cfg, "");

    std::ofstream file;
    auto& out = open_output(file, output);
    if (format == "json") {
        json j{{"n", returns.size()},      {"mean", stats.mean},   {"median", stats.median},
               {"min", stats.min},          {"max", stats.max},     {"std", stats.std},
               {"skewness", stats.skewness}, {"kurtosis", stats.kurtosis}};
        out << j.dump(2) << "\n";
    } else {
        out << "n,mean,median,min,max,std,skewness,kurtosis\n"
            << returns.size() << "," << fmt(stats.mean) << "," << fmt(stats.median) << ","
            << fmt(stats.min) << "," << fmt(stats.max) << "," << fmt(stats.std) << ","
            << fmt(stats.skewness) << "," << fmt(stats.kurtosis) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- calibrate

int cmd_calibrate(const std::string& input, const lcare::CsvSpec& spec,
                  const std::string& scenario_file, const std::string& label, double tau,
                  double r, double rho, int paths, std::uint64_t seed, int min_window,
                  int burn_in, const std::string& cv_mode, const std::string& artifacts_dir) {
    lcare::LpaConfig config;
    config.tau = tau;
    config.r = r;
    config.rho = rho;
    config.n_paths = paths;
    config.min_fit_window = min_window;
    config.burn_in = burn_in;
    config.cv_mode = cv_mode == "propagation" ? lcare::CvMode::propagation : lcare::CvMode::level;

    std::optional<lcare::ReturnSeries> returns;
    if (!input.empty()) returns = load_returns(input, spec, lcare::ReturnKind::simple);

    std::string resolved_label;
    auto params = scenario_params(scenario_file, label, tau,
                                  returns ? &*returns : nullptr, resolved_label);

    json cfg{{"command", "calibrate"}, {"tau", tau},     {"r", r},
             {"rho", rho},             {"paths", paths}, {"seed", seed},
             {"scenario", resolved_label}, {"min_window", min_window},
             {"burn_in", burn_in},     {"cv_mode", cv_mode},
             {"scheme", config.scheme.lengths}};
    emit_config(cfg, artifacts_dir);

    auto bound = lcare::simulate_risk_bound(params, resolved_label, config, seed);
    auto table = lcare::calibrate_critical_values(params, bound, config, seed + 1);

    std::string key = lcare::artifact_key(tau, r, resolved_label, seed, paths);
    fs::path dir(artifacts_dir);
    write_file(dir / ("risk_bound_" + key + ".json"), lcare::to_json(bound));
    write_file(dir / ("critical_values_" + key + ".json"), lcare::to_json(table));

    std::cout << "scenario," << resolved_label << "\nrisk_bound," << fmt(bound.value) << "\n";
    for (std::size_t k = 0; k < table.z.size(); ++k)
        std::cout << "z" << k + 1 << "," << fmt(table.z[k]) << "\n";
    std::cout << "artifact_key," << key << "\n";
    return 0;
}

// ---------------------------------------------------------------- adapt

int cmd_adapt(const std::string& input, const lcare::CsvSpec& spec, double tau, double r,
              const std::vector<std::string>& cv_paths, int t0_first, int t0_last,
              double m_min, double m_max, bool integer_mult, double fixed_alpha,
              const std::string& output, const std::string& artifacts_dir) {
    auto returns = load_returns(input, spec, lcare::ReturnKind::simple);
    if (cv_paths.empty())
        throw UsageError("adapt needs at least one --cv critical-value artifact; "
                         "run the calibrate command first");

    std::map<std::string, lcare::CriticalValueTable> tables;
    lcare::LpaConfig config;
    config.tau = tau;
    config.r = r;
    for (const auto& path : cv_paths) {
        auto table = lcare::critical_values_from_json(read_file(path));
        if (table.tau != tau)
            throw lcare::ConfigMismatch("artifact " + path + " was calibrated at tau " +
                                        fmt(table.tau) + ", requested " + fmt(tau));
        if (table.r != r)
            throw lcare::ConfigMismatch("artifact " + path + " was calibrated at r " +
                                        fmt(table.r) + ", requested " + fmt(r));
        config.scheme.lengths = table.scheme_lengths;
        tables[table.scenario] = std::move(table);
    }

    const auto& y = returns.values();
    int n = static_cast<int>(y.size());
    int n_max = config.scheme.max_length();
    if (t0_first < 0) t0_first = std::max(n_max, 250) - 1;
    if (t0_last < 0) t0_last = n - 1;

    json cfg{{"command", "adapt"}, {"input", input},   {"tau", tau},
             {"r", r},             {"t0_first", t0_first}, {"t0_last", t0_last},
             {"m_min", m_min},     {"m_max", m_max},   {"integer_multiplier", integer_mult},
             {"scheme", config.scheme.lengths}};
    if (fixed_alpha > 0) cfg["fixed_alpha"] = fixed_alpha;
    emit_config(cfg, artifacts_dir);

    auto days = lcare::adaptive_series(y, t0_first, t0_last, config,
                                       lcare::ScenarioSet::builtin(), tables);

    lcare::RiskSeriesConfig risk_cfg;
    risk_cfg.multiplier = {m_min, m_max, integer_mult};
    if (fixed_alpha > 0) risk_cfg.fixed_alpha = fixed_alpha;

    std::ostringstream csv;
    csv << "date,t0,scenario,k_hat,interval_length";
    for (int j = 0; j < 8; ++j) csv << ",alpha" << j;
    csv << ",sigma_eps,expectile,alpha,es,multiplier,error\n";
    int failures = 0;
    for (const auto& day : days) {
        csv << returns.dates()[static_cast<std::size_t>(day.t0)].str() << "," << day.t0 << ",";
        if (!day.result) {
            ++failures;
            csv << ",,";
            for (int j = 0; j < 9; ++j) csv << ",";
            csv << ",,,," << day.error << "\n";
            continue;
        }
        const auto& res = *day.result;
        auto pts = lcare::risk_series({returns.dates()[static_cast<std::size_t>(day.t0)]},
                                      {res.expectile_forecast}, {res.fit.params.sigma_eps},
                                      tau, risk_cfg);
        const auto& pt = pts[0];
        csv << res.scenario << "," << res.k_hat << "," << res.interval_length;
        for (double a : res.fit.params.alpha) csv << "," << fmt(a);
        csv << "," << fmt(res.fit.params.sigma_eps) << "," << fmt(res.expectile_forecast);
        if (pt.ok)
            csv << "," << fmt(pt.alpha) << "," << fmt(pt.es) << "," << fmt(pt.multiplier) << ",";
        else {
            ++failures;
            csv << ",,,," << pt.error;
        }
        csv << "\n";
    }

    std::ofstream file;
    open_output(file, output) << csv.str();
    if (!artifacts_dir.empty() && !output.empty())
        write_file(fs::path(artifacts_dir) / fs::path(output).filename(), csv.str());
    std::cerr << days.size() << " days, " << failures << " failures\n";
    return 0;
}

// ---------------------------------------------------------------- fit

int cmd_fit(const std::string& input, const lcare::CsvSpec& spec, double tau, int window_len,
            int end_index, const std::string& output) {
    auto returns = load_returns(input, spec, lcare::ReturnKind::simple);
    int n = static_cast<int>(returns.size());
    if (end_index < 0) end_index = n - 1;
    int begin = end_index - window_len + 1;
    if (begin < 0)
        throw UsageError("window of " + std::to_string(window_len) +
                         " does not fit before index " + std::to_string(end_index));

    json cfg{{"command", "fit"}, {"input", input}, {"tau", tau},
             {"window", window_len}, {"end", end_index}};
    emit_config(cfg, "");

    lcare::DataWindow w{returns.values(), begin, window_len};
    auto fit = lcare::fit_care(w, tau);
    std::ofstream file;
    open_output(file, output) << lcare::to_json(fit);
    return 0;
}

// ---------------------------------------------------------------- backtest

struct StrategySpec {
    std::string kind; // constant | lcare | care | caviar
    double constant = 0;
    std::string path; // adapt artifact for lcare
};

StrategySpec parse_strategy(const std::string& text) {
    StrategySpec s;
    auto colon = text.find(':');
    s.kind = text.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto to_num = [&](const std::string& v) {
        try {
            return std::stod(v);
        } catch (const std::exception&) {
            throw UsageError("bad numeric strategy argument '" + v + "' in '" + text + "'");
        }
    };
    if (s.kind == "constant") {
        if (arg.empty()) throw UsageError("--strategy constant needs a value, e.g. constant:5");
        s.constant = to_num(arg);
        if (!(s.constant >= 0)) throw UsageError("constant multiplier must be non-negative");
    } else if (s.kind == "lcare") {
        if (arg.empty())
            throw UsageError("--strategy lcare needs the per-day risk table produced by the "
                             "adapt command; run adapt first and pass lcare:<its output csv>");
        s.path = arg;
    } else if (s.kind == "care" || s.kind == "caviar") {
        if (!arg.empty()) s.constant = to_num(arg); // optional refit stride override
    } else {
        throw UsageError("unknown strategy '" + s.kind +
                         "'; expected constant:<m>, lcare:<adapt csv>, care, caviar");
    }
    return s;
}

std::map<lcare::Date, double> load_adapt_multipliers(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open adapt artifact: " + path);
    std::string line;
    if (!std::getline(in, line)) throw UsageError("adapt artifact is empty: " + path);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    int date_idx = -1, mult_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "date") date_idx = static_cast<int>(i);
        if (header[i] == "multiplier") mult_idx = static_cast<int>(i);
    }
    if (date_idx < 0 || mult_idx < 0)
        throw UsageError("adapt artifact " + path +
                         " lacks date/multiplier columns; regenerate it with the adapt command");
    std::map<lcare::Date, double> out;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) <= std::max(date_idx, mult_idx)) continue;
        const auto& m = cells[static_cast<std::size_t>(mult_idx)];
        if (m.empty()) continue; // failed day
        out[lcare::Date::parse(cells[static_cast<std::size_t>(date_idx)])] = std::stod(m);
    }
    if (out.empty())
        throw UsageError("adapt artifact " + path + " holds no usable multipliers");
    return out;
}

constexpr double kMissing = -1.0;

/// Per-index multipliers; kMissing marks warm-up days. The decision made after
/// observing day t-1 is applied over day t's return.
std::vector<double> rolling_care_multipliers(const lcare::ReturnSeries& returns, double tau,
                                             int window_len, int refit,
                                             const lcare::RiskSeriesConfig& risk_cfg) {
    const auto& y = returns.values();
    int n = static_cast<int>(y.size());
    std::vector<double> m(static_cast<std::size_t>(n), kMissing);
    lcare::CareFit fit;
    int fitted_at = -1;
    for (int t = window_len; t < n; ++t) {
        int end = t - 1;
        if (fitted_at < 0 || end - fitted_at >= refit) {
            lcare::DataWindow w{y, end - window_len + 1, window_len};
            fit = lcare::fit_care(w, tau);
            fitted_at = end;
        }
        double e = lcare::care_expectile_at(fit.params, y, t);
        auto pts = lcare::risk_series({returns.dates()[static_cast<std::size_t>(t)]}, {e},
                                      {fit.params.sigma_eps}, tau, risk_cfg);
        if (pts[0].ok) m[static_cast<std::size_t>(t)] = pts[0].multiplier;
    }
    return m;
}

std::vector<double> rolling_caviar_multipliers(const lcare::ReturnSeries& returns, double alpha,
                                               int window_len, int refit,
                                               const lcare::MultiplierConfig& mult_cfg) {
    const auto& y = returns.values();
    int n = static_cast<int>(y.size());
    std::vector<double> m(static_cast<std::size_t>(n), kMissing);
    lcare::CaviarFit fit;
    int fitted_at = -1;
    for (int t = window_len; t < n; ++t) {
        int end = t - 1;
        if (fitted_at < 0 || end - fitted_at >= refit) {
            auto w = std::span<const double>(y).subspan(
                static_cast<std::size_t>(end - window_len + 1),
                static_cast<std::size_t>(window_len));
            fit = lcare::fit_caviar(w, alpha);
            fitted_at = end;
        }
        // One-step quantile from the recursion run over the trailing window
        // ending at t-1, then advanced once.
        auto w = std::span<const double>(y).subspan(
            static_cast<std::size_t>(t - window_len), static_cast<std::size_t>(window_len));
        auto q = lcare::caviar_quantile_path(fit.params, w);
        double q_next = fit.params.beta[0] + fit.params.beta[1] * q[q.size() - 1] +
                        fit.params.beta[2] * q[q.size() - 2] +
                        fit.params.beta[3] * q[q.size() - 3] +
                        fit.params.beta[4] * std::max(y[static_cast<std::size_t>(t - 1)], 0.0) +
                        fit.params.beta[5] * std::min(y[static_cast<std::size_t>(t - 1)], 0.0);
        m[static_cast<std::size_t>(t)] = lcare::multiplier_from_es(q_next, mult_cfg);
    }
    return m;
}

int cmd_backtest(const std::string& input, const lcare::CsvSpec& spec,
                 const std::vector<std::string>& strategy_specs, double tau, double alpha,
                 int window_len, int refit, double protection, int horizon, double riskfree,
                 double initial, bool rollover, bool integer_mult, double m_min, double m_max,
                 const std::string& output, const std::string& paths_dir) {
    auto returns = load_returns(input, spec, lcare::ReturnKind::simple);
    int n = static_cast<int>(returns.size());
    if (strategy_specs.empty()) throw UsageError("backtest needs at least one --strategy");

    json cfg{{"command", "backtest"}, {"input", input},       {"strategies", strategy_specs},
             {"tau", tau},            {"alpha", alpha},       {"window", window_len},
             {"refit", refit},        {"protection", protection}, {"horizon", horizon},
             {"riskfree", riskfree},  {"initial", initial},   {"rollover", rollover},
             {"m_min", m_min},        {"m_max", m_max},       {"integer_multiplier", integer_mult}};
    emit_config(cfg, paths_dir);

    lcare::RiskSeriesConfig risk_cfg;
    risk_cfg.multiplier = {m_min, m_max, integer_mult};

    std::map<std::string, std::vector<double>> raw;
    for (const auto& text : strategy_specs) {
        auto s = parse_strategy(text);
        if (s.kind == "constant") {
            raw["constant_" + fmt(s.constant)] =
                std::vector<double>(static_cast<std::size_t>(n), s.constant);
        } else if (s.kind == "lcare") {
            auto by_date = load_adapt_multipliers(s.path);
            std::vector<double> m(static_cast<std::size_t>(n), kMissing);
            // Row dated d carries the forecast for the next trading day.
            for (int t = 1; t < n; ++t) {
                auto it = by_date.find(returns.dates()[static_cast<std::size_t>(t - 1)]);
                if (it != by_date.end()) m[static_cast<std::size_t>(t)] = it->second;
            }
            raw["lcare"] = std::move(m);
        } else if (s.kind == "care") {
            int stride = s.constant > 0 ? static_cast<int>(s.constant) : refit;
            raw["care"] = rolling_care_multipliers(returns, tau, window_len, stride, risk_cfg);
        } else {
            int stride = s.constant > 0 ? static_cast<int>(s.constant) : refit;
            raw["caviar"] =
                rolling_caviar_multipliers(returns, alpha, window_len, stride, risk_cfg.multiplier);
        }
    }

    // Trim every series to the common span where all strategies have values.
    int start = 0;
    for (const auto& [name, m] : raw)
        for (int t = start; t < n; ++t) {
            if (m[static_cast<std::size_t>(t)] == kMissing) start = t + 1;
        }
    if (start >= n) throw UsageError("no common date span across the requested strategies");
    std::vector<lcare::Date> dates(returns.dates().begin() + start, returns.dates().end());
    std::vector<double> values(returns.values().begin() + start, returns.values().end());
    lcare::ReturnSeries trimmed(dates, values, returns.kind());
    std::map<std::string, std::vector<double>> sources;
    for (auto& [name, m] : raw)
        sources[name] = std::vector<double>(m.begin() + start, m.end());

    lcare::TippConfig tipp;
    tipp.initial_value = initial;
    tipp.protection = protection;
    tipp.horizon = horizon;
    tipp.riskfree = riskfree;
    tipp.rollover = rollover;

    auto suite = lcare::strategy_suite(trimmed, sources, tipp);

    std::ostringstream csv;
    csv << "strategy,ann_return_pct,ann_volatility_pct,var99_pct,skewness,kurtosis,sharpe,"
           "bound_violations,error\n";
    for (const auto& res : suite) {
        if (!res.ok) {
            csv << res.name << ",,,,,,,," << res.error << "\n";
            continue;
        }
        const auto& st = res.stats;
        csv << res.name << "," << fmt(st.ann_return_pct) << "," << fmt(st.ann_volatility_pct)
            << "," << fmt(st.var99_pct) << "," << fmt(st.skewness) << "," << fmt(st.kurtosis)
            << "," << fmt(st.sharpe) << "," << res.bound_violations << ",\n";
    }

    std::ofstream file;
    open_output(file, output) << csv.str();

    if (!paths_dir.empty()) {
        for (const auto& res : suite) {
            if (res.path.empty()) continue;
            std::ostringstream path_csv;
            path_csv << "date,value,floor,cushion,exposure,multiplier,gap,exposure_capped\n";
            for (const auto& st : res.path)
                path_csv << st.date.str() << "," << fmt(st.value) << "," << fmt(st.floor) << ","
                         << fmt(st.cushion) << "," << fmt(st.exposure) << ","
                         << fmt(st.multiplier) << "," << (st.gap ? 1 : 0) << ","
                         << (st.exposure_capped ? 1 : 0) << "\n";
            write_file(fs::path(paths_dir) / ("path_" + res.name + ".csv"), path_csv.str());
        }
    }
    return 0;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::string& artifacts_dir, const std::string& output) {
    if (!fs::is_directory(artifacts_dir))
        throw UsageError("artifact directory not found: " + artifacts_dir);

    json cfg{{"command", "report"}, {"artifacts", artifacts_dir}};
    emit_config(cfg, "");

    std::ostringstream csv;
    csv << "file,artifact,scenario,tau,r,detail\n";
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(artifacts_dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        json j;
        try {
            j = json::parse(read_file(path.string()));
        } catch (const json::exception&) {
            csv << path.filename().string() << ",unreadable,,,,\n";
            continue;
        }
        std::string kind = j.value("artifact", j.value("command", "other"));
        std::string detail;
        if (kind == "risk_bound") detail = "value=" + fmt(j.value("value", 0.0));
        else if (kind == "critical_values")
            detail = "steps=" + std::to_string(j.value("z", std::vector<double>{}).size());
        csv << path.filename().string() << "," << kind << "," << j.value("scenario", "") << ","
            << (j.contains("tau") ? fmt(j["tau"].get<double>()) : "") << ","
            << (j.contains("r") ? fmt(j["r"].get<double>()) : "") << "," << detail << "\n";
    }
    std::ofstream file;
    open_output(file, output) << csv.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive expectile tail risk and portfolio insurance toolkit"};
    app.require_subcommand(1);

    lcare::CsvSpec spec;
    std::string input, output, artifacts = "artifacts", return_kind = "simple",
                format = "csv", scenario = "mid", scenario_file;
    double tau = 0.05, r = 1.0, rho = 0.25, m_min = 1.0, m_max = 12.0, fixed_alpha = 0.0,
           alpha = 0.065, protection = 0.9, riskfree = 0.0, initial = 100.0;
    int paths = 1000, min_window = 20, burn_in = 100, t0_first = -1, t0_last = -1,
        window_len = 250, end_index = -1, refit = 5, horizon = 250;
    std::uint64_t seed = 20240815;
    bool integer_mult = false, rollover = false;
    std::vector<std::string> cv_paths, strategies;

    auto add_io = [&](CLI::App* cmd, bool need_input) {
        auto* opt = cmd->add_option("--input", input, "price CSV with a header row");
        if (need_input) opt->required();
        cmd->add_option("--date-col", spec.date_col, "date column name");
        cmd->add_option("--price-col", spec.price_col, "price column name");
        cmd->add_option("--output", output, "output path (default stdout)");
    };

    auto* c_sum = app.add_subcommand("summarize", "descriptive statistics of daily returns");
    add_io(c_sum, true);
    c_sum->add_option("--return-kind", return_kind, "simple|log")
        ->check(CLI::IsMember({"simple", "log"}));
    c_sum->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    auto* c_cal = app.add_subcommand("calibrate", "Monte Carlo risk bound and critical values");
    add_io(c_cal, false);
    c_cal->add_option("--tau", tau, "expectile level");
    c_cal->add_option("--r", r, "risk power");
    c_cal->add_option("--rho", rho, "significance level");
    c_cal->add_option("--scenario", scenario, "low|mid|high|auto");
    c_cal->add_option("--scenario-file", scenario_file, "JSON with alpha[8] and sigma_eps");
    c_cal->add_option("--paths", paths, "Monte Carlo paths");
    c_cal->add_option("--seed", seed, "RNG seed");
    c_cal->add_option("--min-window", min_window, "smallest window passed to the fitter");
    c_cal->add_option("--burn-in", burn_in, "simulation burn-in");
    std::string cv_mode = "level";
    c_cal->add_option("--cv-mode", cv_mode, "level|propagation")
        ->check(CLI::IsMember({"level", "propagation"}));
    c_cal->add_option("--artifacts", artifacts, "artifact directory");

    auto* c_adp = app.add_subcommand("adapt", "per-day adaptive interval selection and risk");
    add_io(c_adp, true);
    c_adp->add_option("--tau", tau, "expectile level");
    c_adp->add_option("--r", r, "risk power");
    c_adp->add_option("--cv", cv_paths, "critical-value artifact(s) from calibrate")->required();
    c_adp->add_option("--t0-first", t0_first, "first day index (default: first with full history)");
    c_adp->add_option("--t0-last", t0_last, "last day index (default: series end)");
    c_adp->add_option("--m-min", m_min, "multiplier floor");
    c_adp->add_option("--m-max", m_max, "multiplier cap");
    c_adp->add_flag("--integer-multiplier", integer_mult, "round multipliers to integers");
    c_adp->add_option("--fixed-alpha", fixed_alpha, "skip per-day level mapping");
    c_adp->add_option("--artifacts", artifacts, "artifact directory for a copy of the output");

    auto* c_fit = app.add_subcommand("fit", "single fixed-window fit");
    add_io(c_fit, true);
    c_fit->add_option("--tau", tau, "expectile level");
    c_fit->add_option("--window", window_len, "window length");
    c_fit->add_option("--end", end_index, "window end index (default: series end)");

    auto* c_bt = app.add_subcommand("backtest", "portfolio insurance comparison");
    add_io(c_bt, true);
    c_bt->add_option("--strategy", strategies,
                     "constant:<m> | lcare:<adapt csv> | care[:stride] | caviar[:stride]")
        ->required();
    c_bt->add_option("--tau", tau, "expectile level for rolling fits");
    c_bt->add_option("--alpha", alpha, "quantile level for the caviar benchmark");
    c_bt->add_option("--window", window_len, "rolling window length");
    c_bt->add_option("--refit", refit, "rolling refit stride in days");
    c_bt->add_option("--protection", protection, "protected fraction of the floor anchor");
    c_bt->add_option("--horizon", horizon, "investment horizon in trading days");
    c_bt->add_option("--riskfree", riskfree, "constant daily risk-free rate");
    c_bt->add_option("--initial", initial, "starting portfolio value");
    c_bt->add_flag("--rollover", rollover, "re-anchor the floor at each horizon boundary");
    c_bt->add_flag("--integer-multiplier", integer_mult, "round multipliers to integers");
    c_bt->add_option("--m-min", m_min, "multiplier floor");
    c_bt->add_option("--m-max", m_max, "multiplier cap");
    c_bt->add_option("--paths-out", artifacts, "directory for per-strategy state paths")
        ->default_val("");

    auto* c_rep = app.add_subcommand("report", "inventory of persisted artifacts");
    c_rep->add_option("--artifacts", artifacts, "artifact directory")->required();
    c_rep->add_option("--output", output, "output path (default stdout)");

    try {
        app.parse(argc, argv);
        if (c_sum->parsed())
            return cmd_summarize(input, spec, return_kind, format, output);
        if (c_cal->parsed())
            return cmd_calibrate(input, spec, scenario_file, scenario, tau, r, rho, paths, seed,
                                 min_window, burn_in, cv_mode, artifacts);
        if (c_adp->parsed())
            return cmd_adapt(input, spec, tau, r, cv_paths, t0_first, t0_last, m_min, m_max,
                             integer_mult, fixed_alpha, output, artifacts);
        if (c_fit->parsed()) return cmd_fit(input, spec, tau, window_len, end_index, output);
        if (c_bt->parsed())
            return cmd_backtest(input, spec, strategies, tau, alpha, window_len, refit,
                                protection, horizon, riskfree, initial, rollover, integer_mult,
                                m_min, m_max, output, artifacts);
        if (c_rep->parsed()) return cmd_report(artifacts, output);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lcare::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lcare::ConfigMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lcare::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
