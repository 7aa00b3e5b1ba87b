#include "lcare/risk.hpp"

#include <algorithm>
#include <cmath>

namespace lcare {

double es_factor(double tau_alpha, double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0,1)");
    if (tau_alpha == 0.5) throw SingularLevel("es factor undefined at tau_alpha = 0.5");
    if (!(tau_alpha > 0 && tau_alpha < 0.5))
        throw Error("tau_alpha must lie in (0, 0.5) for the left-tail regime");
    return std::abs(1.0 + tau_alpha / ((1.0 - 2.0 * tau_alpha) * alpha));
}

double expected_shortfall(double expectile, double tau_alpha, double alpha) {
    return es_factor(tau_alpha, alpha) * expectile;
}

double multiplier_from_es(double es, const MultiplierConfig& cfg) {
    if (!(cfg.m_min <= cfg.m_max)) throw Error("m_min must not exceed m_max");
    double m = es == 0 ? cfg.m_max : 1.0 / std::abs(es);
    m = std::clamp(m, cfg.m_min, cfg.m_max);
    if (cfg.integer_mode) m = std::round(m);
    return m;
}

std::vector<TailRiskPoint> risk_series(const std::vector<Date>& dates,
                                       const std::vector<double>& expectiles,
                                       const std::vector<double>& sigmas, double tau,
                                       const RiskSeriesConfig& cfg) {
    if (dates.size() != expectiles.size() || dates.size() != sigmas.size())
        throw AlignmentError("risk series inputs differ in length");

    std::vector<TailRiskPoint> out;
    out.reserve(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) {
        TailRiskPoint pt;
        pt.date = dates[i];
        pt.expectile = expectiles[i];
        pt.tau_alpha = tau;
        try {
            if (cfg.fixed_alpha) {
                pt.alpha = *cfg.fixed_alpha;
            } else {
                AndParams dist{expectiles[i], sigmas[i], tau};
                pt.alpha = alpha_for_tau(tau, dist).alpha;
            }
            pt.es = expected_shortfall(pt.expectile, tau, pt.alpha);
            pt.multiplier = multiplier_from_es(pt.es, cfg.multiplier);
        } catch (const Error& e) {
            pt.ok = false;
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

} // namespace lcare
