#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcare/and_dist.hpp"
#include "lcare/errors.hpp"
#include "lcare/market_data.hpp"

namespace lcare {

/// |1 + tau_alpha / ((1 - 2 tau_alpha) alpha)|; >= 1 on the left-tail domain.
double es_factor(double tau_alpha, double alpha);

/// Expectile-implied expected shortfall, ES = factor * expectile.
double expected_shortfall(double expectile, double tau_alpha, double alpha);

struct MultiplierConfig {
    double m_min = 1.0;
    double m_max = 12.0;
    bool integer_mode = false; // round the clamped value to the nearest integer
};

/// m = 1/|es| clamped to [m_min, m_max]; es = 0 maps to m_max.
double multiplier_from_es(double es, const MultiplierConfig& cfg = {});

struct TailRiskPoint {
    Date date;
    double expectile = 0;
    double tau_alpha = 0;
    double alpha = 0;
    double es = 0;
    double multiplier = 0;
    bool ok = true;
    std::string error;
};

struct RiskSeriesConfig {
    MultiplierConfig multiplier;
    /// When set, skip the per-day level mapping and use this quantile level.
    std::optional<double> fixed_alpha;
};

/// Per-day mapping of fitted expectiles to ES and TIPP multiplier. The
/// per-day AND comes from the day's fitted scale; the level mapping itself is
/// affine-invariant, so alpha depends only on tau.
std::vector<TailRiskPoint> risk_series(const std::vector<Date>& dates,
                                       const std::vector<double>& expectiles,
                                       const std::vector<double>& sigmas, double tau,
                                       const RiskSeriesConfig& cfg = {});

} // namespace lcare
