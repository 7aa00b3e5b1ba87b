#include "lcare/care.hpp"

#include "lcare/and_dist.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace lcare {

namespace {

double log_norm_const(double tau) {
    return std::log(std::sqrt(std::numbers::pi / (1.0 - tau)) +
                    std::sqrt(std::numbers::pi / tau));
}

} // namespace

std::array<double, 8> care_regressors(std::span<const double> y, int t) {
    auto pos = [&](int lag) { return std::max(y[t - lag], 0.0); };
    auto neg = [&](int lag) { return std::min(y[t - lag], 0.0); };
    return {1.0,
            y[t - 1],
            pos(1) * pos(1),
            pos(2) * pos(2),
            pos(3) * pos(3),
            neg(1) * neg(1),
            neg(2) * neg(2),
            neg(3) * neg(3)};
}

double care_expectile_at(const CareParams& p, std::span<const double> y, int t) {
    auto x = care_regressors(y, t);
    double e = 0;
    for (int j = 0; j < 8; ++j) e += p.alpha[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    return e;
}

std::vector<double> expectile_path(const CareParams& p, DataWindow w) {
    w.validate();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(w.usable_count()));
    for (int t = w.first_usable(); t <= w.end(); ++t)
        out.push_back(care_expectile_at(p, w.series, t));
    return out;
}

double als_loss(const CareParams& p, DataWindow w) {
    w.validate();
    double loss = 0;
    for (int t = w.first_usable(); t <= w.end(); ++t) {
        double r = w.series[static_cast<std::size_t>(t)] - care_expectile_at(p, w.series, t);
        loss += check_function(r, p.tau);
    }
    return loss;
}

double care_loglik(const CareParams& p, DataWindow w) {
    w.validate();
    p.validate();
    const double log_c = std::log(2.0) - std::log(p.sigma_eps) - log_norm_const(p.tau);
    double ll = 0;
    for (int t = w.first_usable(); t <= w.end(); ++t) {
        double u = (w.series[static_cast<std::size_t>(t)] - care_expectile_at(p, w.series, t)) /
                   p.sigma_eps;
        ll += log_c - check_function(u, p.tau);
    }
    return ll;
}

double sample_expectile(std::span<const double> values, double tau) {
    if (values.empty()) throw InsufficientData("empty sample");
    double e = 0;
    for (double v : values) e += v;
    e /= static_cast<double>(values.size());
    for (int it = 0; it < 200; ++it) {
        double num = 0, den = 0;
        for (double v : values) {
            double w = v <= e ? 1.0 - tau : tau;
            num += w * v;
            den += w;
        }
        double next = num / den;
        if (std::abs(next - e) < 1e-14) return next;
        e = next;
    }
    return e;
}

CareFit fit_care(DataWindow w, double tau, const CareFitOptions& opts) {
    w.validate(opts.min_window);
    if (!(tau > 0 && tau < 1)) throw Error("tau must lie in (0,1)");

    const int n_eff = w.usable_count();
    Eigen::MatrixXd x(n_eff, 8);
    Eigen::VectorXd y(n_eff);
    for (int i = 0; i < n_eff; ++i) {
        int t = w.first_usable() + i;
        auto reg = care_regressors(w.series, t);
        for (int j = 0; j < 8; ++j) x(i, j) = reg[static_cast<std::size_t>(j)];
        y(i) = w.series[static_cast<std::size_t>(t)];
    }

    std::vector<int> free_idx;
    for (int j = 0; j < 8; ++j)
        if (opts.free_params[static_cast<std::size_t>(j)]) free_idx.push_back(j);
    if (free_idx.empty()) throw Error("at least one coefficient must be free");
    const int n_free = static_cast<int>(free_idx.size());
    Eigen::MatrixXd xf(n_eff, n_free);
    for (int j = 0; j < n_free; ++j) xf.col(j) = x.col(free_idx[static_cast<std::size_t>(j)]);

    // Initial weight assignment: from the supplied parameters or from the
    // unconditional tau-expectile of the window.
    Eigen::VectorXd e(n_eff);
    if (opts.init) {
        Eigen::Map<const Eigen::VectorXd> a0(opts.init->alpha.data(), 8);
        e = x * a0;
    } else {
        double flat = sample_expectile(
            w.series.subspan(static_cast<std::size_t>(w.first_usable()),
                             static_cast<std::size_t>(n_eff)),
            tau);
        e.setConstant(flat);
    }

    std::vector<char> signs(static_cast<std::size_t>(n_eff));
    auto assign_signs = [&] {
        bool changed = false;
        for (int i = 0; i < n_eff; ++i) {
            char s = y(i) <= e(i) ? 1 : 0; // ties count as the lower branch
            if (signs[static_cast<std::size_t>(i)] != s) changed = true;
            signs[static_cast<std::size_t>(i)] = s;
        }
        return changed;
    };
    assign_signs();

    CareFit fit;
    fit.window_end = w.end();
    fit.window_len = w.len;
    fit.params.tau = tau;

    Eigen::VectorXd alpha(8);
    double best_loss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_alpha = Eigen::VectorXd::Zero(8);
    bool best_rank_deficient = false;

    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        Eigen::VectorXd wvec(n_eff);
        for (int i = 0; i < n_eff; ++i)
            wvec(i) = signs[static_cast<std::size_t>(i)] ? 1.0 - tau : tau;

        Eigen::MatrixXd xtwx = xf.transpose() * wvec.asDiagonal() * xf;
        Eigen::VectorXd xtwy = xf.transpose() * (wvec.cwiseProduct(y));

        // Equilibrate: the regressor columns span many orders of magnitude
        // (intercept vs squared return lags), so solve in units where each
        // diagonal is one and scale back. The ridge is relative to that scale.
        Eigen::VectorXd d(n_free);
        for (int j = 0; j < n_free; ++j)
            d(j) = xtwx(j, j) > 0 ? 1.0 / std::sqrt(xtwx(j, j)) : 1.0;
        Eigen::MatrixXd scaled = d.asDiagonal() * xtwx * d.asDiagonal();
        Eigen::VectorXd rhs = d.cwiseProduct(xtwy);

        Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
        bool degenerate = ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12;
        if (degenerate) {
            Eigen::MatrixXd ridged =
                scaled + opts.ridge * Eigen::MatrixXd::Identity(n_free, n_free);
            ldlt.compute(ridged);
            fit.rank_deficient = true;
        }
        Eigen::VectorXd alpha_red = d.cwiseProduct(ldlt.solve(rhs));
        alpha.setZero();
        for (int j = 0; j < n_free; ++j) alpha(free_idx[static_cast<std::size_t>(j)]) = alpha_red(j);

        e = x * alpha;
        double loss = 0;
        for (int i = 0; i < n_eff; ++i)
            loss += check_function(y(i) - e(i), tau);
        if (loss < best_loss) {
            best_loss = loss;
            best_alpha = alpha;
            best_rank_deficient = degenerate;
        }

        if (!assign_signs()) {
            fit.converged = true;
            ++iter;
            break;
        }
    }
    fit.iterations = iter;

    for (int j = 0; j < 8; ++j) fit.params.alpha[static_cast<std::size_t>(j)] = best_alpha(j);
    fit.rank_deficient = fit.rank_deficient || best_rank_deficient;
    fit.als = best_loss;

    // Profile scale: d loglik / d sigma = 0 gives sigma^2 = 2 sum w r^2 / n.
    e = x * best_alpha;
    double wss = 0;
    for (int i = 0; i < n_eff; ++i) {
        double r = y(i) - e(i);
        wss += (r <= 0 ? 1.0 - tau : tau) * r * r;
    }
    double sigma2 = 2.0 * wss / static_cast<double>(n_eff);
    fit.params.sigma_eps = std::sqrt(std::max(sigma2, 1e-24));
    fit.loglik = care_loglik(fit.params, w);
    return fit;
}

} // namespace lcare
