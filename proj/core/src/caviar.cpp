#include "lcare/caviar.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lcare/nelder_mead.hpp"

namespace lcare {

namespace {

double empirical_quantile(std::vector<double> v, double alpha) {
    std::sort(v.begin(), v.end());
    double pos = alpha * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    auto hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double seed_quantile(std::span<const double> window, double alpha) {
    std::size_t m = std::min<std::size_t>(window.size(), 10);
    return empirical_quantile({window.begin(), window.begin() + static_cast<long>(m)}, alpha);
}

} // namespace

std::vector<double> caviar_quantile_path(const CaviarParams& p, std::span<const double> window) {
    if (window.size() < 4) throw InsufficientData("caviar window needs at least 4 observations");
    const double q0 = seed_quantile(window, p.alpha);
    std::vector<double> q(window.size());
    q[0] = q[1] = q[2] = q0;
    for (std::size_t t = 3; t < window.size(); ++t) {
        double yp = std::max(window[t - 1], 0.0);
        double ym = std::min(window[t - 1], 0.0);
        q[t] = p.beta[0] + p.beta[1] * q[t - 1] + p.beta[2] * q[t - 2] + p.beta[3] * q[t - 3] +
               p.beta[4] * yp + p.beta[5] * ym;
    }
    return q;
}

double caviar_tick_loss(const CaviarParams& p, std::span<const double> window) {
    auto q = caviar_quantile_path(p, window);
    double loss = 0;
    for (std::size_t t = 3; t < window.size(); ++t) {
        double ind = window[t] <= q[t] ? 1.0 : 0.0;
        loss += (p.alpha - ind) * (window[t] - q[t]);
    }
    return loss;
}

CaviarFit fit_caviar(std::span<const double> window, double alpha, const CaviarFitOptions& opts) {
    if (static_cast<int>(window.size()) < opts.min_window)
        throw InsufficientData("caviar window below the minimum of " +
                               std::to_string(opts.min_window));
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0,1)");

    const double q0 = seed_quantile(window, alpha);

    auto objective = [&](const std::vector<double>& x) {
        CaviarParams p;
        std::copy_n(x.begin(), 6, p.beta.begin());
        p.alpha = alpha;
        double loss = caviar_tick_loss(p, window);
        double ar = std::abs(p.beta[1]) + std::abs(p.beta[2]) + std::abs(p.beta[3]);
        if (ar >= 1.0) loss += 10.0 * (ar - 1.0 + 1e-3) * (ar - 1.0 + 1e-3);
        return loss;
    };

    // Robust initial guess: the empirical quantile as a constant path.
    std::vector<double> base = {q0, 0, 0, 0, 0, 0};

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    NelderMeadOptions nm;
    nm.max_iterations = opts.max_iterations;
    nm.tolerance = opts.tolerance;

    CaviarFit best;
    bool have_best = false;
    for (int s = 0; s < opts.starts; ++s) {
        std::vector<double> x0 = base;
        if (s > 0) {
            x0[0] += 0.5 * std::abs(q0) * gauss(rng);
            for (std::size_t j = 1; j < 4; ++j) x0[j] += 0.25 * gauss(rng);
            for (std::size_t j = 4; j < 6; ++j) x0[j] += 0.25 * gauss(rng);
        }
        auto res = nelder_mead(objective, std::move(x0), nm);
        if (!have_best || res.value < best.tick_loss) {
            have_best = true;
            std::copy_n(res.x.begin(), 6, best.params.beta.begin());
            best.params.alpha = alpha;
            best.tick_loss = res.value;
            best.converged = res.converged;
        }
    }
    if (!have_best) throw FitError("all caviar starts failed");

    best.window_len = static_cast<int>(window.size());
    best.window_end = best.window_len - 1;
    best.stationarity_penalty_active = !best.params.stationary();
    best.quantile_path = caviar_quantile_path(best.params, window);
    best.tick_loss = caviar_tick_loss(best.params, window);
    return best;
}

} // namespace lcare
