#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lcare/and_dist.hpp"

#include "test_util.hpp"

using namespace lcare;

namespace {

double norm_pdf(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Integration range wide enough for both branch scales at extreme tau.
std::pair<double, double> support(const AndParams& p) {
    double lo = p.sigma / std::sqrt(2.0 * (1.0 - p.tau));
    double hi = p.sigma / std::sqrt(2.0 * p.tau);
    return {p.mu - 14.0 * lo, p.mu + 14.0 * hi};
}

} // namespace

TEST_CASE("pdf normalizes to one across tau") {
    for (double tau : {0.0025, 0.01, 0.05, 0.5, 0.9}) {
        AndParams p{0.3, 1.7, tau};
        auto [a, b] = support(p);
        double mass = testutil::integrate([&](double x) { return and_pdf(x, p); }, a, b, 1e-11);
        CHECK(std::abs(mass - 1.0) < 1e-8);
    }
}

TEST_CASE("tau one half collapses to the normal density") {
    AndParams p{0.4, 1.3, 0.5};
    for (double x : {-3.0, -1.0, 0.0, 0.4, 1.0, 2.5}) {
        CHECK(std::abs(and_pdf(x, p) - norm_pdf(x, p.mu, p.sigma)) < 1e-12);
    }
}

TEST_CASE("cdf matches integrated pdf and differentiates back") {
    AndParams p{-0.2, 0.8, 0.05};
    auto [a, unused] = support(p);
    for (double x : {-1.5, -0.3, -0.2, 0.0, 1.0, 4.0}) {
        double by_quad = testutil::integrate([&](double t) { return and_pdf(t, p); }, a, x, 1e-11);
        CHECK(std::abs(and_cdf(x, p) - by_quad) < 1e-8);
        double h = 1e-6;
        double fd = (and_cdf(x + h, p) - and_cdf(x - h, p)) / (2.0 * h);
        CHECK(fd == doctest::Approx(and_pdf(x, p)).epsilon(1e-6));
    }
    CHECK(and_cdf(p.mu, p) ==
          doctest::Approx(std::sqrt(p.tau) / (std::sqrt(p.tau) + std::sqrt(1.0 - p.tau)))
              .epsilon(1e-12));
}

TEST_CASE("quantile inverts the cdf") {
    AndParams p{0.1, 2.0, 0.01};
    for (double prob : {0.001, 0.05, 0.3, 0.5, 0.9, 0.999}) {
        double q = and_quantile(prob, p);
        CHECK(and_cdf(q, p) == doctest::Approx(prob).epsilon(1e-9));
    }
    CHECK_THROWS_AS(and_quantile(0.0, p), Error);
    CHECK_THROWS_AS(and_quantile(1.0, p), Error);
}

TEST_CASE("partial first moment closed form equals quadrature") {
    AndParams p{0.25, 1.4, 0.05};
    auto [a, unused] = support(p);
    for (double q : {-2.0, 0.0, 0.25, 1.5, 8.0}) {
        double oracle =
            testutil::integrate([&](double t) { return t * and_pdf(t, p); }, a, q, 1e-11);
        CHECK(std::abs(partial_first_moment(q, p) - oracle) < 1e-8);
    }
    // Standard-normal case: first partial moment at the location is -phi(0).
    AndParams sn{0.0, 1.0, 0.5};
    CHECK(partial_first_moment(0.0, sn) ==
          doctest::Approx(-1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("mean matches quadrature and the sampler") {
    AndParams p{0.0, 1.0, 0.05};
    auto [a, b] = support(p);
    double oracle = testutil::integrate([&](double t) { return t * and_pdf(t, p); }, a, b, 1e-11);
    CHECK(and_mean(p) == doctest::Approx(oracle).epsilon(1e-8));

    auto draws = and_sample(p, 400000, 123);
    double m = 0;
    for (double d : draws) m += d;
    m /= static_cast<double>(draws.size());
    CHECK(std::abs(m - and_mean(p)) < 0.02);
}

TEST_CASE("sampler distribution: KS against the cdf") {
    AndParams p{0.0, 1.0, 0.05};
    auto draws = and_sample(p, 20000, 77);
    std::sort(draws.begin(), draws.end());
    double ks = 0;
    const double n = static_cast<double>(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        double f = and_cdf(draws[i], p);
        ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) / n));
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    }
    // 1% critical value of the one-sample KS statistic is 1.63 / sqrt(n).
    CHECK(ks < 1.63 / std::sqrt(n));

    // At tau = 0.5 the same draws must look standard normal.
    AndParams sn{0.0, 1.0, 0.5};
    auto nd = and_sample(sn, 20000, 78);
    std::sort(nd.begin(), nd.end());
    double ks2 = 0;
    for (std::size_t i = 0; i < nd.size(); ++i) {
        double f = norm_cdf(nd[i]);
        ks2 = std::max(ks2, std::abs(f - static_cast<double>(i + 1) / n));
        ks2 = std::max(ks2, std::abs(f - static_cast<double>(i) / n));
    }
    CHECK(ks2 < 1.63 / std::sqrt(n));
}

TEST_CASE("location is the tau expectile") {
    for (double tau : {0.0025, 0.05, 0.5, 0.8}) {
        AndParams p{0.7, 1.9, tau};
        CHECK(expectile_of(p, tau) == doctest::Approx(p.mu).epsilon(1e-7));
    }
}

TEST_CASE("level mapping") {
    AndParams p{0.0, 1.0, 0.05};
    // By construction mu is the 0.05-expectile, so the alpha matching
    // tau 0.05 is exactly the mass of the negative branch, and the matched
    // quantile is mu itself.
    double branch = negative_branch_prob(0.05);
    auto fwd = tau_for_alpha(branch, p);
    CHECK(fwd.tau_alpha == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(fwd.q_alpha == doctest::Approx(0.0).scale(1).epsilon(1e-8));

    auto inv = alpha_for_tau(0.05, p);
    CHECK(inv.alpha == doctest::Approx(branch).epsilon(1e-6));
    // Round trip.
    auto back = tau_for_alpha(inv.alpha, p);
    CHECK(back.tau_alpha == doctest::Approx(0.05).epsilon(1e-6));

    // Affine invariance: shifting and scaling the distribution leaves the
    // level mapping unchanged.
    AndParams q{0.3, 2.5, 0.05};
    auto inv2 = alpha_for_tau(0.05, q);
    CHECK(inv2.alpha == doctest::Approx(inv.alpha).epsilon(1e-8));
}
