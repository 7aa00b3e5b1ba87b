#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "lcare/errors.hpp"

namespace lcare {

/// Parameter vector theta = (alpha0..alpha7, sigma_eps) at expectile level tau.
struct CareParams {
    std::array<double, 8> alpha{};
    double sigma_eps = 1;
    double tau = 0.5;

    void validate() const {
        if (!(sigma_eps > 0)) throw Error("CareParams: sigma_eps must be positive");
        if (!(tau > 0 && tau < 1)) throw Error("CareParams: tau must lie in (0,1)");
    }
};

/// A right-end window into a return series. Regressors at position t use the
/// lags t-1..t-3 of the underlying series, so a window that starts at
/// begin >= 3 loses no observations; a window at the series start burns the
/// first three.
struct DataWindow {
    std::span<const double> series;
    int begin = 0;
    int len = 0;

    int end() const { return begin + len - 1; }
    /// First position with all three lags available.
    int first_usable() const { return begin >= 3 ? begin : 3; }
    int usable_count() const { return begin + len - first_usable(); }

    void validate(int min_len = 4) const {
        if (begin < 0 || len < 1 || begin + len > static_cast<int>(series.size()))
            throw IndexError("data window out of range");
        if (len < min_len)
            throw InsufficientData("window of " + std::to_string(len) +
                                   " observations is below the minimum of " +
                                   std::to_string(min_len));
    }
};

/// Regressor vector [1, y_{t-1}, (y+_{t-1})^2, (y+_{t-2})^2, (y+_{t-3})^2,
/// (y-_{t-1})^2, (y-_{t-2})^2, (y-_{t-3})^2].
std::array<double, 8> care_regressors(std::span<const double> y, int t);

/// Expectile value e_t for a single position from its three lags.
double care_expectile_at(const CareParams& p, std::span<const double> y, int t);

/// e_t over the window's usable positions, in order.
std::vector<double> expectile_path(const CareParams& p, DataWindow w);

/// Asymmetric least squares loss over the window.
double als_loss(const CareParams& p, DataWindow w);

/// Quasi log-likelihood under the AND working density.
double care_loglik(const CareParams& p, DataWindow w);

struct CareFitOptions {
    int max_iterations = 100;
    int min_window = 20;
    double ridge = 1e-8;
    std::optional<CareParams> init;
    /// Coefficients with a false entry are pinned to zero (restricted fit).
    std::array<bool, 8> free_params{true, true, true, true, true, true, true, true};
};

struct CareFit {
    CareParams params;
    double loglik = 0;
    double als = 0;
    int window_end = 0;
    int window_len = 0;
    bool converged = false;
    bool rank_deficient = false;
    int iterations = 0;
};

/// QMLE over a fixed window: IRLS on the expectile coefficients (each step is
/// a weighted linear solve), then the closed-form profile
/// sigma^2 = 2 sum w_t r_t^2 / n_eff.
CareFit fit_care(DataWindow w, double tau, const CareFitOptions& opts = {});

/// Scalar tau-expectile of a sample, by the same reweighting iteration.
double sample_expectile(std::span<const double> values, double tau);

} // namespace lcare
