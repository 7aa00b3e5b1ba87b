#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcare/care.hpp"
#include "lcare/errors.hpp"

namespace lcare {

/// Nested right-end candidate interval lengths.
struct IntervalScheme {
    std::vector<int> lengths;

    /// {60, 72, 86, 104, 124, 149, 179, 250}.
    static IntervalScheme standard();
    /// n_k = round(n0 * c^k) for k < count-1, then the explicit cap.
    static IntervalScheme geometric(int n0, double c, int count, int cap);

    int steps() const { return static_cast<int>(lengths.size()) - 1; } // K
    int max_length() const { return lengths.back(); }
    void validate() const;
};

/// How critical values are chosen from the simulated statistics.
/// `level` pins each step to the marginal (1 - rho) quantile of T_k so the
/// per-step false-alarm rate equals rho; `propagation` is the sequential
/// minimal-value rule under the risk budget. The sequential rule admits
/// degenerate (zero) values at late steps, where a false alarm costs almost
/// nothing, so `level` is the default.
enum class CvMode { level, propagation };

struct LpaConfig {
    IntervalScheme scheme = IntervalScheme::standard();
    CvMode cv_mode = CvMode::level;
    double tau = 0.05;
    double r = 1.0;         // risk power, {0.8, 1.0} in practice
    double rho = 0.25;      // significance level; rho_k = rho * k / K
    int n_paths = 1000;     // Monte Carlo path count
    int min_fit_window = 20;
    int burn_in = 100;      // pre-sample observations discarded in simulation
    int split_stride = 1;   // >1 subsamples the split points of J_k
};

struct Scenario {
    std::string label; // "low" | "mid" | "high"
    CareParams params;
};

/// Per expectile level, the three pooled-quartile parameter constellations.
class ScenarioSet {
public:
    static ScenarioSet builtin(); // levels 0.0025, 0.01, 0.05

    void add(double tau, Scenario scenario);
    const Scenario& get(double tau, const std::string& label) const;
    const std::vector<Scenario>& at_level(double tau) const;
    std::vector<double> levels() const;

    /// Nearest-alpha1 rule: below 'low' -> low, above 'high' -> high,
    /// otherwise the closest of the three.
    std::string classify(double tau, double alpha1) const;

private:
    std::map<double, std::vector<Scenario>> by_level_;
};

struct RiskBound {
    std::string scenario;
    double tau = 0;
    double r = 0;
    double value = 0;
    int n_paths = 0;
    std::uint64_t seed = 0;
    int discarded_paths = 0;
};

struct CriticalValueTable {
    std::string scenario;
    double tau = 0;
    double r = 0;
    double rho = 0;
    std::vector<int> scheme_lengths;
    std::vector<double> z; // z[k-1] for steps k = 1..K
    int n_paths = 0;
    std::uint64_t seed = 0;
    double risk_bound = 0;
};

struct LcpStep {
    double statistic = 0;
    double critical_value = 0;
    bool rejected = false;
};

struct LcpResult {
    std::vector<LcpStep> steps; // computed up to and including the first rejection
    int k_hat = 0;
    int interval_length = 0;
    std::string scenario;
    CareFit fit;                // QMLE on the interval of homogeneity
    double expectile_forecast = 0; // one-step-ahead e_{t0+1}
};

struct CvValidation {
    std::vector<double> reject_prob; // P(T_k > z_k) on fresh paths
    std::vector<double> delta;       // |rho - reject_prob|
    int n_paths = 0;
};

/// Simulate the expectile recursion with AND(0, sigma_eps, tau) innovations.
/// Initial lags are zero; `burn` pre-sample draws are discarded.
std::vector<double> simulate_care_path(const CareParams& params, int n, int burn,
                                       std::uint64_t seed);

/// Likelihood-ratio sup statistic over the split points of J_k, divided by the
/// enclosing interval length so it lives on the same per-observation scale as
/// the risk bound. For the final step the enclosing interval is I_K itself.
/// Splits whose sub-windows fall below the minimum fit window are skipped.
double lcp_statistic(std::span<const double> y, int t0, int k, const LpaConfig& config);

RiskBound simulate_risk_bound(const CareParams& scenario_params, const std::string& label,
                              const LpaConfig& config, std::uint64_t seed);

CriticalValueTable calibrate_critical_values(const CareParams& scenario_params,
                                             const RiskBound& bound, const LpaConfig& config,
                                             std::uint64_t seed);

CvValidation validate_critical_values(const CareParams& scenario_params,
                                      const CriticalValueTable& table, const LpaConfig& config,
                                      std::uint64_t seed);

/// Trailing one-year CARE fit; classifies alpha1 against the scenario set.
std::string select_scenario(std::span<const double> y, int t0, double tau,
                            const ScenarioSet& scenarios, int year_window = 250);

/// Sequential test with a fixed critical-value table.
LcpResult adaptive_fit_with(std::span<const double> y, int t0, const LpaConfig& config,
                            const CriticalValueTable& table);

/// Full procedure: scenario selection, then the sequential test with the
/// matching table.
LcpResult adaptive_fit(std::span<const double> y, int t0, const LpaConfig& config,
                       const ScenarioSet& scenarios,
                       const std::map<std::string, CriticalValueTable>& tables);

struct AdaptiveDay {
    int t0 = 0;
    std::optional<LcpResult> result;
    std::string error; // non-empty when the day failed
};

std::vector<AdaptiveDay> adaptive_series(std::span<const double> y, int t0_first, int t0_last,
                                         const LpaConfig& config, const ScenarioSet& scenarios,
                                         const std::map<std::string, CriticalValueTable>& tables);

} // namespace lcare
