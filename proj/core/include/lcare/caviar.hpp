#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lcare/errors.hpp"

namespace lcare {

/// Recursive quantile specification
/// q_t = b0 + b1 q_{t-1} + b2 q_{t-2} + b3 q_{t-3} + b4 y+_{t-1} + b5 y-_{t-1}.
struct CaviarParams {
    std::array<double, 6> beta{};
    double alpha = 0.05;

    /// Soft stationarity check on the autoregressive lags.
    bool stationary() const {
        return std::abs(beta[1]) + std::abs(beta[2]) + std::abs(beta[3]) < 1.0;
    }
};

struct CaviarFit {
    CaviarParams params;
    double tick_loss = 0;
    int window_end = 0;
    int window_len = 0;
    bool converged = false;
    bool stationarity_penalty_active = false;
    std::vector<double> quantile_path;
};

struct CaviarFitOptions {
    int starts = 20;
    int max_iterations = 500;
    double tolerance = 1e-8;
    int min_window = 60;
    std::uint64_t seed = 42;
};

/// Recursion seeded with the empirical alpha-quantile of the first 10
/// observations for q1..q3, then forward. Values align with the window.
std::vector<double> caviar_quantile_path(const CaviarParams& p, std::span<const double> window);

/// Tick loss sum (alpha - I(y <= q))(y - q) from the 4th observation on.
double caviar_tick_loss(const CaviarParams& p, std::span<const double> window);

/// Multi-start simplex minimization of the tick loss; ties break to the
/// lowest start index.
CaviarFit fit_caviar(std::span<const double> window, double alpha,
                     const CaviarFitOptions& opts = {});

} // namespace lcare
