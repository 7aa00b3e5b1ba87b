#include <benchmark/benchmark.h>

#include "lcare/and_dist.hpp"
#include "lcare/care.hpp"
#include "lcare/lpa.hpp"

namespace {

const lcare::CareParams& mid_params() {
    static const lcare::CareParams p =
        lcare::ScenarioSet::builtin().get(0.05, "mid").params;
    return p;
}

void bm_fit_care(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto y = lcare::simulate_care_path(mid_params(), n, 100, 1);
    for (auto _ : state) {
        auto fit = lcare::fit_care(lcare::DataWindow{y, 0, n}, 0.05);
        benchmark::DoNotOptimize(fit.als);
    }
}
BENCHMARK(bm_fit_care)->Arg(60)->Arg(250)->Arg(1000);

void bm_lcp_statistic(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    lcare::LpaConfig cfg;
    auto y = lcare::simulate_care_path(mid_params(), 251, 100, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lcare::lcp_statistic(y, 250, k, cfg));
    }
}
BENCHMARK(bm_lcp_statistic)->Arg(1)->Arg(4)->Arg(7);

void bm_adaptive_fit(benchmark::State& state) {
    lcare::LpaConfig cfg;
    auto y = lcare::simulate_care_path(mid_params(), 251, 100, 3);
    lcare::CriticalValueTable table;
    table.scenario = "mid";
    table.tau = cfg.tau;
    table.r = cfg.r;
    table.rho = cfg.rho;
    table.scheme_lengths = cfg.scheme.lengths;
    table.z.assign(7, 4.5);
    for (auto _ : state) {
        auto res = lcare::adaptive_fit_with(y, 250, cfg, table);
        benchmark::DoNotOptimize(res.k_hat);
    }
}
BENCHMARK(bm_adaptive_fit);

void bm_and_sample(benchmark::State& state) {
    lcare::AndParams p{0.0, 1.0, 0.05};
    for (auto _ : state) {
        auto draws = lcare::and_sample(p, 10000, 4);
        benchmark::DoNotOptimize(draws.data());
    }
}
BENCHMARK(bm_and_sample);

} // namespace

BENCHMARK_MAIN();
