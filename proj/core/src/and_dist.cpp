#include "lcare/and_dist.hpp"

#include <cmath>
#include <numbers>

namespace lcare {

namespace {

constexpr double kPi = std::numbers::pi;

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Normalizing sum sqrt(pi/(1-tau)) + sqrt(pi/tau).
double norm_const(double tau) {
    return std::sqrt(kPi / (1.0 - tau)) + std::sqrt(kPi / tau);
}

struct RootOptions {
    double tol = 1e-10;
    int max_iter = 200;
};

// Bisection to bracket, secant polish near the end.
template <typename F>
double solve_root(F&& f, double lo, double hi, const RootOptions& opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    int expand = 0;
    while (flo * fhi > 0 && expand < 60) {
        double mid = 0.5 * (lo + hi);
        double span = hi - lo;
        lo = mid - span;
        hi = mid + span;
        flo = f(lo);
        fhi = f(hi);
        ++expand;
    }
    if (flo * fhi > 0)
        throw NumericalError("root not bracketed, residuals " + std::to_string(flo) + ", " +
                             std::to_string(fhi));
    for (int i = 0; i < opt.max_iter; ++i) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (fmid == 0 || hi - lo < opt.tol) {
            // Secant polish from the bisection bracket.
            double a = lo, b = mid, fa = flo, fb = fmid;
            for (int j = 0; j < 8 && fb != fa; ++j) {
                double c = b - fb * (b - a) / (fb - fa);
                if (!std::isfinite(c)) break;
                a = b;
                fa = fb;
                b = c;
                fb = f(b);
                if (std::abs(fb) < 1e-300) break;
            }
            return std::abs(fb) <= std::abs(fmid) ? b : mid;
        }
        if (flo * fmid <= 0) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double check_function(double u, double tau) {
    return u <= 0 ? (1.0 - tau) * u * u : tau * u * u;
}

double negative_branch_prob(double tau) {
    double st = std::sqrt(tau);
    double s1 = std::sqrt(1.0 - tau);
    return st / (st + s1);
}

double and_pdf(double y, const AndParams& p) {
    p.validate();
    double u = (y - p.mu) / p.sigma;
    return 2.0 / (p.sigma * norm_const(p.tau)) * std::exp(-check_function(u, p.tau));
}

double and_cdf(double y, const AndParams& p) {
    p.validate();
    double u = (y - p.mu) / p.sigma;
    double pn = negative_branch_prob(p.tau);
    if (u <= 0)
        return pn * 2.0 * norm_cdf(u * std::sqrt(2.0 * (1.0 - p.tau)));
    double pp = 1.0 - pn;
    return pn + pp * (2.0 * norm_cdf(u * std::sqrt(2.0 * p.tau)) - 1.0);
}

double and_quantile(double prob, const AndParams& p) {
    p.validate();
    if (!(prob > 0 && prob < 1)) throw Error("quantile level must lie in (0,1)");
    double spread = p.sigma / std::sqrt(2.0 * std::min(p.tau, 1.0 - p.tau));
    return solve_root([&](double y) { return and_cdf(y, p) - prob; },
                      p.mu - 10.0 * spread, p.mu + 10.0 * spread);
}

double partial_first_moment(double q, const AndParams& p) {
    p.validate();
    double u = (q - p.mu) / p.sigma;
    double c = norm_const(p.tau);
    double a = 1.0 - p.tau; // negative-branch kernel coefficient
    double b = p.tau;       // positive-branch kernel coefficient
    double iu;              // \int_{-inf}^{u} v g(v) dv with g the standardized density
    if (u <= 0) {
        iu = (2.0 / c) * (-std::exp(-a * u * u) / (2.0 * a));
    } else {
        iu = (2.0 / c) * (-1.0 / (2.0 * a) + (1.0 - std::exp(-b * u * u)) / (2.0 * b));
    }
    return p.mu * and_cdf(q, p) + p.sigma * iu;
}

double and_mean(const AndParams& p) {
    p.validate();
    return p.mu + p.sigma * (1.0 / p.tau - 1.0 / (1.0 - p.tau)) / norm_const(p.tau);
}

double and_sample_one(const AndParams& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double z = std::abs(gauss(rng));
    if (unif(rng) < negative_branch_prob(p.tau))
        return p.mu - z * p.sigma / std::sqrt(2.0 * (1.0 - p.tau));
    return p.mu + z * p.sigma / std::sqrt(2.0 * p.tau);
}

std::vector<double> and_sample(const AndParams& p, std::size_t n, std::uint64_t seed) {
    p.validate();
    if (n < 1) throw Error("sample size must be positive");
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = and_sample_one(p, rng);
    return out;
}

double expectile_of(const AndParams& p, double level) {
    p.validate();
    if (!(level > 0 && level < 1)) throw Error("expectile level must lie in (0,1)");
    double mean = and_mean(p);
    // First-order condition: level E[(Y-e)+] - (1-level) E[(e-Y)+] = 0,
    // decreasing in e, so the sign is flipped for the increasing bracket.
    auto g = [&](double e) {
        double f = and_cdf(e, p);
        double m = partial_first_moment(e, p);
        double upper = mean - m - e * (1.0 - f); // E[(Y-e)+]
        double lower = e * f - m;                // E[(e-Y)+]
        return (1.0 - level) * lower - level * upper;
    };
    double spread = p.sigma / std::sqrt(2.0 * std::min(p.tau, 1.0 - p.tau));
    return solve_root(g, p.mu - 10.0 * spread, p.mu + 10.0 * spread);
}

LevelMapping tau_for_alpha(double alpha, const AndParams& p) {
    p.validate();
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0,1)");
    LevelMapping m;
    m.alpha = alpha;
    m.distribution = p;
    m.q_alpha = and_quantile(alpha, p);
    double pm = partial_first_moment(m.q_alpha, p);
    double mean = and_mean(p);
    double num = alpha * m.q_alpha - pm;
    double den = mean - 2.0 * pm - (1.0 - 2.0 * alpha) * m.q_alpha;
    if (den == 0) throw NumericalError("degenerate level-mapping denominator");
    m.tau_alpha = num / den;
    return m;
}

LevelMapping alpha_for_tau(double tau_target, const AndParams& p) {
    p.validate();
    if (!(tau_target > 0 && tau_target < 1)) throw Error("tau must lie in (0,1)");
    auto g = [&](double a) { return tau_for_alpha(a, p).tau_alpha - tau_target; };
    // tau_alpha is monotone increasing in alpha; bracket inside (0,1).
    double lo = 1e-10, hi = 1.0 - 1e-10;
    double alpha = solve_root(g, lo, hi, {1e-12, 200});
    alpha = std::clamp(alpha, lo, hi);
    LevelMapping m = tau_for_alpha(alpha, p);
    if (std::abs(m.tau_alpha - tau_target) > 1e-8)
        throw NumericalError("alpha_for_tau residual " +
                             std::to_string(m.tau_alpha - tau_target));
    return m;
}

} // namespace lcare
