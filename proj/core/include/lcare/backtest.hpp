#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "lcare/errors.hpp"
#include "lcare/market_data.hpp"

namespace lcare {

struct TippConfig {
    double initial_value = 100.0;  // F
    double protection = 0.9;       // s
    int horizon = 250;             // trading days per investment horizon
    double riskfree = 0.0;         // constant daily rate; a series overrides it
    std::vector<double> riskfree_series;
    /// Re-anchor the floor to the prevailing portfolio value at each horizon
    /// boundary. Off by default: one continuous running-max path.
    bool rollover = false;
};

struct TippState {
    Date date;
    double value = 0;       // V_t
    double floor = 0;       // F_t^s
    double cushion = 0;     // C_t = V_t - F_t^s
    double exposure = 0;    // G_t
    double multiplier = 0;  // m used on this day
    double running_max = 0;
    bool gap = false;           // cushion went negative on this day
    bool exposure_capped = false; // m * C exceeded V and was truncated
};

/// Day-by-day TIPP recursion; multipliers[t] is applied over return t+1...
/// i.e. the series are aligned: state t consumes returns.values()[t].
std::vector<TippState> run_tipp(const ReturnSeries& returns, std::span<const double> multipliers,
                                const TippConfig& config = {});

struct BoundViolation {
    int index = 0;      // day whose next-day return breaks the bound
    double multiplier = 0;
    double bound = 0;   // 1 / (-r^-_{t+1})
};

struct BoundReport {
    std::vector<BoundViolation> violations;
    int days_checked = 0;
};

/// Flags every day where m_t exceeds 1/(-r^-_{t+1}) — the gap-risk events
/// where the discrete-time cushion would go negative.
BoundReport multiplier_bound_check(const ReturnSeries& returns,
                                   std::span<const double> multipliers);

struct PerfStats {
    double ann_return_pct = 0;   // mean * 250 * 100
    double ann_volatility_pct = 0; // std * sqrt(250) * 100
    double var99_pct = 0;        // empirical 1% quantile of daily returns, in %
    double skewness = 0;
    double kurtosis = 0;         // non-excess
    double sharpe = 0;
    bool degenerate = false;     // zero variance; sharpe reported as 0
};

/// initial_value > 0 includes the first day's return off the starting wealth.
PerfStats performance(const std::vector<TippState>& states, double riskfree = 0.0,
                      double initial_value = 0.0);
PerfStats performance_of_returns(std::span<const double> daily_returns, double riskfree = 0.0);

struct StrategyResult {
    std::string name;
    PerfStats stats;
    std::vector<TippState> path;
    int bound_violations = 0;
    bool ok = true;
    std::string error;
};

/// Runs the TIPP engine once per multiplier source plus the raw index row.
std::vector<StrategyResult> strategy_suite(
    const ReturnSeries& returns, const std::map<std::string, std::vector<double>>& sources,
    const TippConfig& config = {});

} // namespace lcare
