#include "lcare/nelder_mead.hpp"

#include <algorithm>
#include <cmath>

namespace lcare {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += x0[i] != 0 ? opts.initial_step * std::abs(x0[i]) + 1e-4
                                        : opts.initial_step;

    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    NelderMeadResult res;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });

        if (std::abs(fv[order.back()] - fv[order.front()]) <
            opts.tolerance * (1.0 + std::abs(fv[order.front()]))) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[i]][j] / static_cast<double>(n);

        auto point = [&](double coef) {
            std::vector<double> p(n);
            const auto& worst = simplex[order.back()];
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (centroid[j] - worst[j]);
            return p;
        };

        auto reflected = point(1.0);
        double fr = f(reflected);
        if (fr < fv[order.front()]) {
            auto expanded = point(2.0);
            double fe = f(expanded);
            if (fe < fr) {
                simplex[order.back()] = std::move(expanded);
                fv[order.back()] = fe;
            } else {
                simplex[order.back()] = std::move(reflected);
                fv[order.back()] = fr;
            }
        } else if (fr < fv[order[n - 1]]) {
            simplex[order.back()] = std::move(reflected);
            fv[order.back()] = fr;
        } else {
            auto contracted = point(-0.5);
            double fc = f(contracted);
            if (fc < fv[order.back()]) {
                simplex[order.back()] = std::move(contracted);
                fv[order.back()] = fc;
            } else {
                const auto& best = simplex[order.front()];
                for (std::size_t i = 1; i <= n; ++i) {
                    auto& p = simplex[order[i]];
                    for (std::size_t j = 0; j < n; ++j) p[j] = best[j] + 0.5 * (p[j] - best[j]);
                    fv[order[i]] = f(p);
                }
            }
        }
    }

    auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
    res.x = simplex[static_cast<std::size_t>(best)];
    res.value = fv[static_cast<std::size_t>(best)];
    res.iterations = iter;
    return res;
}

} // namespace lcare
