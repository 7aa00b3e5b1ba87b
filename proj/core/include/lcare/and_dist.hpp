#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lcare/errors.hpp"

namespace lcare {

/// Two glued half-normals. The location mu is the tau-expectile of the
/// distribution; the kernel exp(-eta_tau(u)) has branch variances
/// sigma^2 / (2(1-tau)) below mu and sigma^2 / (2 tau) above it.
struct AndParams {
    double mu = 0;
    double sigma = 1;
    double tau = 0.5;

    void validate() const {
        if (!(sigma > 0)) throw Error("AndParams: sigma must be positive");
        if (!(tau > 0 && tau < 1)) throw Error("AndParams: tau must lie in (0,1)");
    }
};

/// eta_tau(u): (1-tau) u^2 for u <= 0, tau u^2 for u > 0.
double check_function(double u, double tau);

double and_pdf(double y, const AndParams& p);
double and_cdf(double y, const AndParams& p);

/// Inverse cdf by bracketed root search (bisection + secant polish).
double and_quantile(double prob, const AndParams& p);

/// \int_{-inf}^{q} y dF(y), closed form on each half-normal branch.
double partial_first_moment(double q, const AndParams& p);

/// Total first moment E[Y].
double and_mean(const AndParams& p);

/// Mass of the negative branch: sqrt(tau) / (sqrt(tau) + sqrt(1-tau)).
double negative_branch_prob(double tau);

/// One draw by branch composition: Bernoulli branch pick, then half-normal.
double and_sample_one(const AndParams& p, std::mt19937_64& rng);

std::vector<double> and_sample(const AndParams& p, std::size_t n, std::uint64_t seed);

/// Solves level * E[(Y-e)+] = (1-level) * E[(e-Y)+]; equals p.mu at level = p.tau.
double expectile_of(const AndParams& p, double level);

struct LevelMapping {
    double alpha = 0;      // quantile level
    double tau_alpha = 0;  // matched expectile level
    double q_alpha = 0;    // the alpha-quantile of the distribution
    AndParams distribution;
};

/// Quantile level -> matched expectile level under the distribution p: the
/// returned tau_alpha is the level whose expectile coincides with the
/// alpha-quantile of p. Equivalently F(e_{tau_alpha}) = alpha.
LevelMapping tau_for_alpha(double alpha, const AndParams& p);

/// Inverts tau_for_alpha by bracketed root search in alpha.
LevelMapping alpha_for_tau(double tau_target, const AndParams& p);

} // namespace lcare
