#include "lcare/backtest.hpp"

#include <algorithm>
#include <cmath>

namespace lcare {

namespace {

double floor_value(const TippConfig& cfg, double anchor, double running_max, int pos,
                   double rf) {
    int days_left = cfg.horizon - pos % cfg.horizon;
    double discounted = anchor * std::exp(-rf * static_cast<double>(days_left));
    return cfg.protection * std::max(discounted, running_max);
}

} // namespace

std::vector<TippState> run_tipp(const ReturnSeries& returns, std::span<const double> multipliers,
                                const TippConfig& config) {
    const std::size_t n = returns.size();
    if (multipliers.size() != n)
        throw AlignmentError("multiplier series and return series differ in length");
    if (!(config.initial_value > 0)) throw Error("initial value must be positive");
    if (!(config.protection > 0 && config.protection < 1))
        throw Error("protection fraction must lie in (0,1)");
    if (!config.riskfree_series.empty() && config.riskfree_series.size() != n)
        throw AlignmentError("risk-free series and return series differ in length");

    std::vector<TippState> states;
    states.reserve(n);

    double value = config.initial_value;
    double anchor = config.initial_value;
    double running_max = value;
    bool in_cash = false;

    for (std::size_t t = 0; t < n; ++t) {
        int pos = static_cast<int>(t);
        if (config.rollover && t > 0 && pos % config.horizon == 0) {
            anchor = value;
            running_max = value;
            in_cash = false;
        }
        double rf = config.riskfree_series.empty() ? config.riskfree
                                                   : config.riskfree_series[t];
        double m = multipliers[t];
        if (!(m >= 0)) throw Error("multipliers must be non-negative");

        double floor_pre = floor_value(config, anchor, running_max, pos, rf);
        double cushion_pre = value - floor_pre;

        TippState st;
        st.date = returns.dates()[t];
        st.multiplier = m;

        double exposure = in_cash ? 0.0 : m * std::max(cushion_pre, 0.0);
        if (exposure > value) {
            exposure = value;
            st.exposure_capped = true;
        }
        st.exposure = exposure;

        double r = returns.values()[t];
        value = value + exposure * r + (value - exposure) * rf;
        running_max = std::max(running_max, value);

        st.value = value;
        st.running_max = running_max;
        st.floor = floor_value(config, anchor, running_max, pos + 1, rf);
        st.cushion = value - st.floor;
        if (st.cushion < 0) {
            st.gap = true;
            in_cash = true;
        }
        states.push_back(st);
    }
    return states;
}

BoundReport multiplier_bound_check(const ReturnSeries& returns,
                                   std::span<const double> multipliers) {
    const std::size_t n = returns.size();
    if (multipliers.size() != n)
        throw AlignmentError("multiplier series and return series differ in length");
    BoundReport report;
    // m_t is exposed to return t+1's downside; the final day has no next return.
    for (std::size_t t = 0; t + 1 < n; ++t) {
        double next_neg = std::min(returns.values()[t + 1], 0.0);
        ++report.days_checked;
        if (next_neg == 0) continue;
        double bound = 1.0 / (-next_neg);
        if (multipliers[t] > bound)
            report.violations.push_back({static_cast<int>(t), multipliers[t], bound});
    }
    return report;
}

PerfStats performance_of_returns(std::span<const double> daily, double riskfree) {
    if (daily.size() < 1) throw InsufficientData("need at least one daily return");
    PerfStats s;
    const auto n = static_cast<double>(daily.size());
    double mean = 0;
    for (double d : daily) mean += d;
    mean /= n;
    s.ann_return_pct = mean * 250.0 * 100.0;

    double m2 = 0, m3 = 0, m4 = 0, ss = 0;
    for (double v : daily) {
        double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        ss += d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // Relative threshold: a constant series leaves only rounding noise in m2.
    if (m2 <= 1e-24 * (1.0 + mean * mean) || daily.size() < 2) {
        s.degenerate = true;
        s.sharpe = 0;
    } else {
        double sd = std::sqrt(ss / (n - 1.0));
        s.ann_volatility_pct = sd * std::sqrt(250.0) * 100.0;
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
        s.sharpe = (s.ann_return_pct - riskfree * 250.0 * 100.0) / s.ann_volatility_pct;
    }

    std::vector<double> sorted(daily.begin(), daily.end());
    std::sort(sorted.begin(), sorted.end());
    double pos = 0.01 * (n - 1.0);
    auto lo = static_cast<std::size_t>(pos);
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    s.var99_pct = (sorted[lo] * (1.0 - frac) + sorted[hi] * frac) * 100.0;
    return s;
}

PerfStats performance(const std::vector<TippState>& states, double riskfree,
                      double initial_value) {
    if (states.size() < 2) throw InsufficientData("need at least two states");
    std::vector<double> daily;
    daily.reserve(states.size());
    if (initial_value > 0) daily.push_back(states[0].value / initial_value - 1.0);
    for (std::size_t t = 1; t < states.size(); ++t)
        daily.push_back(states[t].value / states[t - 1].value - 1.0);
    return performance_of_returns(daily, riskfree);
}

std::vector<StrategyResult> strategy_suite(
    const ReturnSeries& returns, const std::map<std::string, std::vector<double>>& sources,
    const TippConfig& config) {
    std::vector<StrategyResult> out;

    StrategyResult index_row;
    index_row.name = "index";
    index_row.stats = performance_of_returns(returns.values(), config.riskfree);
    out.push_back(std::move(index_row));

    for (const auto& [name, multipliers] : sources) {
        StrategyResult res;
        res.name = name;
        try {
            res.path = run_tipp(returns, multipliers, config);
            res.stats = performance(res.path, config.riskfree, config.initial_value);
            res.bound_violations =
                static_cast<int>(multiplier_bound_check(returns, multipliers).violations.size());
        } catch (const Error& e) {
            res.ok = false;
            res.error = e.what();
        }
        out.push_back(std::move(res));
    }
    return out;
}

} // namespace lcare
