#include <doctest.h>

#include <cmath>

#include "lcare/lpa.hpp"

using namespace lcare;

namespace {

LpaConfig quick_config(int paths = 60) {
    LpaConfig cfg;
    cfg.tau = 0.05;
    cfg.r = 1.0;
    cfg.n_paths = paths;
    return cfg;
}

CareParams mid() { return ScenarioSet::builtin().get(0.05, "mid").params; }

} // namespace

TEST_CASE("interval scheme") {
    auto std_scheme = IntervalScheme::standard();
    CHECK(std_scheme.lengths == std::vector<int>{60, 72, 86, 104, 124, 149, 179, 250});
    CHECK(std_scheme.steps() == 7);
    CHECK(std_scheme.max_length() == 250);

    auto geo = IntervalScheme::geometric(60, 1.2, 8, 250);
    CHECK(geo.lengths.size() == 8);
    CHECK(geo.lengths.front() == 60);
    CHECK(geo.lengths.back() == 250);

    CHECK_THROWS_AS(IntervalScheme({{50, 50}}).validate(), Error);
    CHECK_THROWS_AS(IntervalScheme({{50}}).validate(), Error);
}

TEST_CASE("scenario classification") {
    auto set = ScenarioSet::builtin();
    // Below the low quartile alpha1 (-0.035 at this level).
    CHECK(set.classify(0.05, -0.4) == "low");
    CHECK(set.classify(0.05, -0.035) == "low");
    CHECK(set.classify(0.05, 0.051) == "mid");
    CHECK(set.classify(0.05, 0.153) == "high");
    CHECK(set.classify(0.05, 0.8) == "high");
    CHECK(set.classify(0.05, 0.05) == "mid");
    CHECK_THROWS_AS(set.classify(0.33, 0.0), ConfigMismatch);
    CHECK_THROWS_AS(set.get(0.05, "nope"), ConfigMismatch);
    CHECK(set.at_level(0.01).size() == 3);
}

TEST_CASE("simulated paths are deterministic in the seed") {
    auto a = simulate_care_path(mid(), 300, 100, 5);
    auto b = simulate_care_path(mid(), 300, 100, 5);
    auto c = simulate_care_path(mid(), 300, 100, 6);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a.size() == 300);
}

TEST_CASE("test statistic is nonnegative on arbitrary data") {
    auto cfg = quick_config();
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto y = simulate_care_path(mid(), 253, 100, seed);
        for (int k = 1; k <= cfg.scheme.steps(); ++k) {
            double t = lcp_statistic(y, 252, k, cfg);
            CHECK(t > -1e-6);
        }
    }
}

TEST_CASE("statistic with a singleton split set") {
    LpaConfig cfg;
    // J_1 = I_1 \ I_0 holds exactly one split point.
    cfg.scheme = IntervalScheme({{40, 41, 82}});
    cfg.tau = 0.05;
    auto y = simulate_care_path(mid(), 90, 100, 9);
    double sup = lcp_statistic(y, 89, 1, cfg);
    CHECK(sup > -1e-6);
    // Stride larger than the set cannot change a singleton sup.
    cfg.split_stride = 5;
    CHECK(lcp_statistic(y, 89, 1, cfg) == sup);
}

TEST_CASE("risk bound degenerate average and power ordering") {
    auto cfg1 = quick_config(1);
    auto b1 = simulate_risk_bound(mid(), "mid", cfg1, 44);
    CHECK(b1.n_paths == 1);
    CHECK(b1.value >= 0.0);

    auto cfg_a = quick_config(40);
    cfg_a.r = 1.0;
    auto cfg_b = cfg_a;
    cfg_b.r = 0.8;
    auto hi = simulate_risk_bound(mid(), "mid", cfg_a, 44);
    auto lo = simulate_risk_bound(mid(), "mid", cfg_b, 44);
    CHECK(hi.value >= lo.value);
}

TEST_CASE("calibration determinism and limiting behavior") {
    auto cfg = quick_config(40);
    auto bound = simulate_risk_bound(mid(), "mid", cfg, 21);
    auto t1 = calibrate_critical_values(mid(), bound, cfg, 22);
    auto t2 = calibrate_critical_values(mid(), bound, cfg, 22);
    CHECK(t1.z == t2.z);
    CHECK(static_cast<int>(t1.z.size()) == cfg.scheme.steps());

    // Huge significance level: the propagation constraint never binds and
    // every critical value collapses to the bottom of the search range.
    auto cfg_loose = cfg;
    cfg_loose.cv_mode = CvMode::propagation;
    cfg_loose.rho = 1e6;
    auto loose_bound = simulate_risk_bound(mid(), "mid", cfg_loose, 21);
    auto loose = calibrate_critical_values(mid(), loose_bound, cfg_loose, 22);
    for (double z : loose.z) CHECK(z == 0.0);

    CHECK_THROWS_AS(
        [&] {
            auto wrong = bound;
            wrong.tau = 0.01;
            calibrate_critical_values(mid(), wrong, cfg, 22);
        }(),
        ConfigMismatch);
}

TEST_CASE("propagation mode keeps a mostly decreasing trend") {
    // The decreasing-trend property is a statement about a well-resolved
    // Monte Carlo table, so this case uses a larger ensemble.
    auto cfg = quick_config(500);
    cfg.cv_mode = CvMode::propagation;
    auto bound = simulate_risk_bound(mid(), "mid", cfg, 31);
    auto table = calibrate_critical_values(mid(), bound, cfg, 32);
    // A Monte Carlo table can wiggle locally; the route must still head down:
    // most steps decrease and the endpoints drop by a wide margin.
    int violations = 0;
    for (std::size_t k = 1; k < table.z.size(); ++k)
        if (table.z[k] > table.z[k - 1] + 1e-9) ++violations;
    CHECK(violations <= 2);
    CHECK(table.z.back() < 0.5 * table.z.front());
    // The critical values live on the same scale as the risk bound.
    CHECK(table.z.front() < 10.0 * bound.value);
}

TEST_CASE("adaptive fit honors forced critical values") {
    auto cfg = quick_config();
    auto y = simulate_care_path(mid(), 260, 100, 3);
    CriticalValueTable table;
    table.scenario = "mid";
    table.tau = cfg.tau;
    table.r = cfg.r;
    table.rho = cfg.rho;
    table.scheme_lengths = cfg.scheme.lengths;
    table.z.assign(7, 1e9);

    auto res = adaptive_fit_with(y, 259, cfg, table);
    CHECK(res.k_hat == 7);
    CHECK(res.interval_length == 250);
    CHECK(res.fit.window_len == 250);
    CHECK(res.steps.size() == 7);

    table.z[0] = -1.0; // forced rejection at the first step
    auto res0 = adaptive_fit_with(y, 259, cfg, table);
    CHECK(res0.k_hat == 0);
    CHECK(res0.interval_length == 60);
    CHECK(res0.steps.size() == 1);
    CHECK(res0.steps[0].rejected);

    table.tau = 0.01;
    CHECK_THROWS_AS(adaptive_fit_with(y, 259, cfg, table), ConfigMismatch);
    table.tau = cfg.tau;
    CHECK_THROWS_AS(adaptive_fit_with(y, 100, cfg, table), IndexError);
}

TEST_CASE("adaptive series isolates per-day failures") {
    auto cfg = quick_config();
    auto y = simulate_care_path(mid(), 262, 100, 8);
    std::map<std::string, CriticalValueTable> tables;
    CriticalValueTable table;
    table.tau = cfg.tau;
    table.r = cfg.r;
    table.rho = cfg.rho;
    table.scheme_lengths = cfg.scheme.lengths;
    table.z.assign(7, 1e9);
    for (const std::string label : {"low", "mid", "high"}) {
        table.scenario = label;
        tables[label] = table;
    }

    // t0 = 248 lacks room for the trailing-year classification window; the
    // failure stays confined to that day.
    auto days = adaptive_series(y, 248, 255, cfg, ScenarioSet::builtin(), tables);
    REQUIRE(days.size() == 8);
    CHECK(!days[0].result);
    CHECK(!days[0].error.empty());
    for (std::size_t i = 1; i < days.size(); ++i) {
        REQUIRE(days[i].result);
        CHECK(days[i].error.empty());
        CHECK(days[i].result->interval_length == 250);
    }
}
