#include "lcare/lpa.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lcare/and_dist.hpp"

namespace lcare {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t base, int i) {
    return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(i) + 1));
}

DataWindow interval_window(std::span<const double> y, int t0, int length) {
    return DataWindow{y, t0 - length + 1, length};
}

// Per simulated path: the statistics the calibration machinery consumes.
struct PathStats {
    std::vector<double> t_stat;                // index k-1, k = 1..K
    std::vector<std::vector<double>> loss;     // loss[k][q] = |l_Ik(th_Ik) - l_Ik(th_Iq-1)|^r
    std::vector<double> risk_diff;             // per interval index, |l(th~) - l(th*)|^r
};

PathStats compute_path_stats(std::span<const double> y, int t0, const LpaConfig& config,
                             const CareParams* truth, bool need_t, bool need_loss) {
    const auto& len = config.scheme.lengths;
    const int k_max = config.scheme.steps();
    CareFitOptions fopts;
    fopts.min_window = config.min_fit_window;

    PathStats st;
    std::vector<CareFit> fits(len.size());
    for (std::size_t k = 0; k < len.size(); ++k)
        fits[k] = fit_care(interval_window(y, t0, len[k]), config.tau, fopts);

    // Likelihood differences enter the risk machinery per observation: the
    // |delta l|^r values are divided by the interval length so short and long
    // candidates compete on the same scale.
    if (truth) {
        st.risk_diff.resize(len.size());
        for (std::size_t k = 0; k < len.size(); ++k) {
            double diff = fits[k].loglik - care_loglik(*truth, interval_window(y, t0, len[k]));
            st.risk_diff[k] =
                std::pow(std::abs(diff), config.r) / static_cast<double>(len[k]);
        }
    }
    if (need_loss) {
        st.loss.assign(len.size(), {});
        for (int k = 1; k <= k_max; ++k) {
            auto& row = st.loss[static_cast<std::size_t>(k)];
            row.assign(static_cast<std::size_t>(k) + 1, 0.0);
            for (int q = 1; q <= k; ++q) {
                double cross = care_loglik(fits[static_cast<std::size_t>(q - 1)].params,
                                           interval_window(y, t0, len[static_cast<std::size_t>(k)]));
                row[static_cast<std::size_t>(q)] =
                    std::pow(std::abs(fits[static_cast<std::size_t>(k)].loglik - cross), config.r) /
                    static_cast<double>(len[static_cast<std::size_t>(k)]);
            }
        }
    }
    if (need_t) {
        st.t_stat.resize(static_cast<std::size_t>(k_max));
        for (int k = 1; k <= k_max; ++k)
            st.t_stat[static_cast<std::size_t>(k - 1)] = lcp_statistic(y, t0, k, config);
    }
    return st;
}

std::vector<PathStats> simulate_ensemble(const CareParams& params, const LpaConfig& config,
                                         std::uint64_t seed, bool need_t, bool need_loss,
                                         const CareParams* truth, int* discarded) {
    const int n = config.scheme.max_length() + 3;
    std::vector<PathStats> out;
    out.reserve(static_cast<std::size_t>(config.n_paths));
    int bad = 0;
    for (int i = 0; i < config.n_paths; ++i) {
        auto y = simulate_care_path(params, n, config.burn_in, path_seed(seed, i));
        try {
            out.push_back(compute_path_stats(y, n - 1, config, truth, need_t, need_loss));
        } catch (const Error&) {
            ++bad;
        }
    }
    if (discarded) *discarded = bad;
    if (out.empty()) throw CalibrationError("all simulated paths failed to fit");
    return out;
}

} // namespace

IntervalScheme IntervalScheme::standard() {
    return {{60, 72, 86, 104, 124, 149, 179, 250}};
}

IntervalScheme IntervalScheme::geometric(int n0, double c, int count, int cap) {
    IntervalScheme s;
    for (int k = 0; k < count - 1; ++k)
        s.lengths.push_back(static_cast<int>(std::lround(n0 * std::pow(c, k))));
    s.lengths.push_back(cap);
    s.validate();
    return s;
}

void IntervalScheme::validate() const {
    if (lengths.size() < 2) throw Error("interval scheme needs at least two lengths");
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (lengths[i] <= 0) throw Error("interval lengths must be positive");
        if (i > 0 && lengths[i] <= lengths[i - 1])
            throw Error("interval lengths must be strictly increasing");
    }
}

void ScenarioSet::add(double tau, Scenario scenario) {
    by_level_[tau].push_back(std::move(scenario));
}

const std::vector<Scenario>& ScenarioSet::at_level(double tau) const {
    for (const auto& [level, scenarios] : by_level_)
        if (std::abs(level - tau) < 1e-12) return scenarios;
    throw ConfigMismatch("no scenarios for expectile level " + std::to_string(tau));
}

const Scenario& ScenarioSet::get(double tau, const std::string& label) const {
    for (const auto& s : at_level(tau))
        if (s.label == label) return s;
    throw ConfigMismatch("no scenario '" + label + "' at level " + std::to_string(tau));
}

std::vector<double> ScenarioSet::levels() const {
    std::vector<double> out;
    for (const auto& [level, scenarios] : by_level_) out.push_back(level);
    return out;
}

std::string ScenarioSet::classify(double tau, double alpha1) const {
    const auto& scenarios = at_level(tau);
    const Scenario* low = nullptr;
    const Scenario* high = nullptr;
    for (const auto& s : scenarios) {
        if (!low || s.params.alpha[1] < low->params.alpha[1]) low = &s;
        if (!high || s.params.alpha[1] > high->params.alpha[1]) high = &s;
    }
    if (alpha1 < low->params.alpha[1]) return low->label;
    if (alpha1 > high->params.alpha[1]) return high->label;
    const Scenario* best = nullptr;
    double best_dist = 0;
    for (const auto& s : scenarios) {
        double d = std::abs(s.params.alpha[1] - alpha1);
        if (!best || d < best_dist) {
            best = &s;
            best_dist = d;
        }
    }
    return best->label;
}

ScenarioSet ScenarioSet::builtin() {
    auto make = [](double tau, std::array<double, 8> a, double sigma) {
        CareParams p;
        p.alpha = a;
        p.sigma_eps = sigma;
        p.tau = tau;
        return p;
    };
    ScenarioSet set;
    // Pooled one-year rolling-estimate quartiles per level.
    set.add(0.05, {"low", make(0.05, {-0.016, -0.035, 0.079, 0.037, 0.052, 0.004, 0.022, -0.014}, 0.001)});
    set.add(0.05, {"mid", make(0.05, {-0.013, 0.051, 0.145, 0.138, 0.147, 0.115, 0.104, 0.099}, 0.002)});
    set.add(0.05, {"high", make(0.05, {-0.009, 0.153, 0.209, 0.247, 0.246, 0.244, 0.156, 0.152}, 0.003)});
    set.add(0.01, {"low", make(0.01, {-0.026, -0.075, 0.077, -0.074, 0.101, -0.055, -0.576, -0.861}, 0.001)});
    set.add(0.01, {"mid", make(0.01, {-0.021, 0.079, 0.155, 0.162, 0.170, 0.106, 0.109, 0.106}, 0.002)});
    set.add(0.01, {"high", make(0.01, {-0.015, 0.240, 0.247, 0.232, 0.452, 0.308, 0.160, 0.149}, 0.002)});
    set.add(0.0025, {"low", make(0.0025, {-0.034, -0.131, -0.319, -0.116, 0.062, 0.031, -1.748, -3.124}, 0.001)});
    set.add(0.0025, {"mid", make(0.0025, {-0.026, 0.090, 0.120, 0.152, 0.152, 0.141, 0.113, 0.108}, 0.002)});
    set.add(0.0025, {"high", make(0.0025, {-0.021, 0.295, 0.207, 0.561, 0.740, 1.463, 0.179, 0.161}, 0.001)});
    return set;
}

std::vector<double> simulate_care_path(const CareParams& params, int n, int burn,
                                       std::uint64_t seed) {
    params.validate();
    std::mt19937_64 rng(seed);
    AndParams innov{0.0, params.sigma_eps, params.tau};
    const int total = n + burn;
    std::vector<double> y(static_cast<std::size_t>(total), 0.0);
    auto lag = [&](int t, int j) { return t - j >= 0 ? y[static_cast<std::size_t>(t - j)] : 0.0; };
    for (int t = 0; t < total; ++t) {
        double e = params.alpha[0];
        e += params.alpha[1] * lag(t, 1);
        for (int j = 1; j <= 3; ++j) {
            double yp = std::max(lag(t, j), 0.0);
            double ym = std::min(lag(t, j), 0.0);
            e += params.alpha[static_cast<std::size_t>(1 + j)] * yp * yp;
            e += params.alpha[static_cast<std::size_t>(4 + j)] * ym * ym;
        }
        y[static_cast<std::size_t>(t)] = e + and_sample_one(innov, rng);
    }
    return {y.begin() + burn, y.end()};
}

double lcp_statistic(std::span<const double> y, int t0, int k, const LpaConfig& config) {
    const auto& len = config.scheme.lengths;
    const int k_max = config.scheme.steps();
    if (k < 1 || k > k_max) throw IndexError("lcp step out of range");
    const int n_k = len[static_cast<std::size_t>(k)];
    const int n_km1 = len[static_cast<std::size_t>(k - 1)];
    const int n_enc = k < k_max ? len[static_cast<std::size_t>(k + 1)] : len.back();
    const int lo = t0 - n_enc + 1;
    if (lo < 0 || t0 >= static_cast<int>(y.size()))
        throw IndexError("t0 does not leave room for the enclosing interval");

    CareFitOptions fopts;
    fopts.min_window = config.min_fit_window;
    const double ll_full = fit_care(DataWindow{y, lo, n_enc}, config.tau, fopts).loglik;

    bool any = false;
    double sup = -std::numeric_limits<double>::infinity();
    const int stride = std::max(config.split_stride, 1);
    for (int s = t0 - n_k + 1; s <= t0 - n_km1; s += stride) {
        const int len_a = s - lo + 1;
        const int len_b = t0 - s;
        if (len_a < config.min_fit_window || len_b < config.min_fit_window) continue;
        try {
            double ll_a = fit_care(DataWindow{y, lo, len_a}, config.tau, fopts).loglik;
            double ll_b = fit_care(DataWindow{y, s + 1, len_b}, config.tau, fopts).loglik;
            sup = std::max(sup, ll_a + ll_b - ll_full);
            any = true;
        } catch (const Error& e) {
            throw FitError("sub-fit failed at step k=" + std::to_string(k) +
                           ", split s=" + std::to_string(s) + ": " + e.what());
        }
    }
    if (!any) throw FitError("no admissible split points at step k=" + std::to_string(k));
    // Per-observation scale of the enclosing interval, matching the risk
    // bound and the propagation losses; this is what makes critical values
    // decrease in k instead of growing with the split count.
    return sup / static_cast<double>(n_enc);
}

RiskBound simulate_risk_bound(const CareParams& scenario_params, const std::string& label,
                              const LpaConfig& config, std::uint64_t seed) {
    int discarded = 0;
    auto paths = simulate_ensemble(scenario_params, config, seed, false, false,
                                   &scenario_params, &discarded);
    RiskBound bound;
    bound.scenario = label;
    bound.tau = config.tau;
    bound.r = config.r;
    bound.n_paths = config.n_paths;
    bound.seed = seed;
    bound.discarded_paths = discarded;
    const std::size_t n_lengths = config.scheme.lengths.size();
    for (std::size_t k = 0; k < n_lengths; ++k) {
        double mean = 0;
        for (const auto& p : paths) mean += p.risk_diff[k];
        mean /= static_cast<double>(paths.size());
        bound.value = std::max(bound.value, mean);
    }
    return bound;
}

CriticalValueTable calibrate_critical_values(const CareParams& scenario_params,
                                             const RiskBound& bound, const LpaConfig& config,
                                             std::uint64_t seed) {
    if (std::abs(bound.tau - config.tau) > 1e-12 || std::abs(bound.r - config.r) > 1e-12)
        throw ConfigMismatch("risk bound was computed for a different (tau, r)");

    auto paths = simulate_ensemble(scenario_params, config, seed, true,
                                   config.cv_mode == CvMode::propagation, nullptr, nullptr);
    const int k_max = config.scheme.steps();
    const auto n = static_cast<double>(paths.size());

    // Upper end of the search range: extreme tail of the pooled statistics.
    std::vector<double> pooled;
    pooled.reserve(paths.size() * static_cast<std::size_t>(k_max));
    for (const auto& p : paths)
        pooled.insert(pooled.end(), p.t_stat.begin(), p.t_stat.end());
    std::sort(pooled.begin(), pooled.end());
    double z_hi = pooled[static_cast<std::size_t>(0.999 * (static_cast<double>(pooled.size()) - 1))];
    z_hi = std::max(z_hi, 1e-12);

    CriticalValueTable table;
    table.scenario = bound.scenario;
    table.tau = config.tau;
    table.r = config.r;
    table.rho = config.rho;
    table.scheme_lengths = config.scheme.lengths;
    table.n_paths = config.n_paths;
    table.seed = seed;
    table.risk_bound = bound.value;

    if (config.cv_mode == CvMode::level) {
        for (int k = 1; k <= k_max; ++k) {
            std::vector<double> t;
            t.reserve(paths.size());
            for (const auto& p : paths) t.push_back(p.t_stat[static_cast<std::size_t>(k - 1)]);
            std::sort(t.begin(), t.end());
            double pos = (1.0 - config.rho) * (static_cast<double>(t.size()) - 1.0);
            auto lo_i = static_cast<std::size_t>(pos);
            auto hi_i = std::min(lo_i + 1, t.size() - 1);
            double frac = pos - static_cast<double>(lo_i);
            table.z.push_back(t[lo_i] * (1.0 - frac) + t[hi_i] * frac);
        }
        return table;
    }

    std::vector<char> survivor(paths.size(), 1);
    for (int q = 1; q <= k_max; ++q) {
        auto satisfies = [&](double z) {
            for (int k = q; k <= k_max; ++k) {
                double lhs = 0;
                for (std::size_t i = 0; i < paths.size(); ++i) {
                    if (!survivor[i]) continue;
                    if (paths[i].t_stat[static_cast<std::size_t>(q - 1)] <= z) continue;
                    lhs += paths[i].loss[static_cast<std::size_t>(k)][static_cast<std::size_t>(q)];
                }
                lhs /= n;
                double rhs = config.rho * static_cast<double>(k) /
                             static_cast<double>(k_max) * bound.value;
                if (lhs > rhs + 1e-15) return false;
            }
            return true;
        };

        double hi = z_hi;
        int guard = 0;
        while (!satisfies(hi)) {
            hi *= 2.0;
            if (++guard > 60)
                throw CalibrationError("propagation inequality unsatisfiable at step " +
                                       std::to_string(q));
        }
        double z;
        if (satisfies(0.0)) {
            z = 0.0;
        } else {
            double lo = 0.0;
            const double tol = 1e-6 * z_hi;
            while (hi - lo > tol) {
                double mid = 0.5 * (lo + hi);
                if (satisfies(mid))
                    hi = mid;
                else
                    lo = mid;
            }
            z = hi;
        }
        table.z.push_back(z);
        for (std::size_t i = 0; i < paths.size(); ++i)
            if (paths[i].t_stat[static_cast<std::size_t>(q - 1)] > z) survivor[i] = 0;
    }
    return table;
}

CvValidation validate_critical_values(const CareParams& scenario_params,
                                      const CriticalValueTable& table, const LpaConfig& config,
                                      std::uint64_t seed) {
    if (table.scheme_lengths != config.scheme.lengths)
        throw ConfigMismatch("critical-value table was built for a different scheme");
    auto paths = simulate_ensemble(scenario_params, config, seed, true, false, nullptr, nullptr);
    const int k_max = config.scheme.steps();
    CvValidation v;
    v.n_paths = static_cast<int>(paths.size());
    for (int k = 1; k <= k_max; ++k) {
        double count = 0;
        for (const auto& p : paths)
            if (p.t_stat[static_cast<std::size_t>(k - 1)] > table.z[static_cast<std::size_t>(k - 1)])
                count += 1.0;
        double prob = count / static_cast<double>(paths.size());
        v.reject_prob.push_back(prob);
        v.delta.push_back(std::abs(config.rho - prob));
    }
    return v;
}

std::string select_scenario(std::span<const double> y, int t0, double tau,
                            const ScenarioSet& scenarios, int year_window) {
    if (t0 + 1 < year_window)
        throw InsufficientData("need a trailing window of " + std::to_string(year_window));
    auto fit = fit_care(interval_window(y, t0, year_window), tau);
    return scenarios.classify(tau, fit.params.alpha[1]);
}

LcpResult adaptive_fit_with(std::span<const double> y, int t0, const LpaConfig& config,
                            const CriticalValueTable& table) {
    if (table.scheme_lengths != config.scheme.lengths ||
        std::abs(table.tau - config.tau) > 1e-12 || std::abs(table.r - config.r) > 1e-12)
        throw ConfigMismatch("critical-value table incompatible with the run configuration");
    if (t0 - config.scheme.max_length() + 1 < 0)
        throw IndexError("t0 does not cover the longest candidate interval");

    const int k_max = config.scheme.steps();
    LcpResult res;
    res.scenario = table.scenario;
    int k_hat = k_max;
    for (int k = 1; k <= k_max; ++k) {
        LcpStep step;
        step.statistic = lcp_statistic(y, t0, k, config);
        step.critical_value = table.z[static_cast<std::size_t>(k - 1)];
        step.rejected = step.statistic > step.critical_value;
        res.steps.push_back(step);
        if (step.rejected) {
            k_hat = k - 1;
            break;
        }
    }
    res.k_hat = k_hat;
    res.interval_length = config.scheme.lengths[static_cast<std::size_t>(k_hat)];
    CareFitOptions fopts;
    fopts.min_window = config.min_fit_window;
    res.fit = fit_care(interval_window(y, t0, res.interval_length), config.tau, fopts);
    res.expectile_forecast = care_expectile_at(res.fit.params, y, t0 + 1);
    return res;
}

LcpResult adaptive_fit(std::span<const double> y, int t0, const LpaConfig& config,
                       const ScenarioSet& scenarios,
                       const std::map<std::string, CriticalValueTable>& tables) {
    auto label = select_scenario(y, t0, config.tau, scenarios);
    auto it = tables.find(label);
    if (it == tables.end())
        throw ConfigMismatch("no critical-value table for scenario '" + label + "'");
    auto res = adaptive_fit_with(y, t0, config, it->second);
    res.scenario = label;
    return res;
}

std::vector<AdaptiveDay> adaptive_series(std::span<const double> y, int t0_first, int t0_last,
                                         const LpaConfig& config, const ScenarioSet& scenarios,
                                         const std::map<std::string, CriticalValueTable>& tables) {
    std::vector<AdaptiveDay> out;
    for (int t0 = t0_first; t0 <= t0_last; ++t0) {
        AdaptiveDay day;
        day.t0 = t0;
        try {
            day.result = adaptive_fit(y, t0, config, scenarios, tables);
        } catch (const Error& e) {
            day.error = e.what();
        }
        out.push_back(std::move(day));
    }
    return out;
}

} // namespace lcare
