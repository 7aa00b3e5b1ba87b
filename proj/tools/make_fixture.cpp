// Generates the bundled synthetic price fixture: a seeded two-regime series
// with one structural break, written as a date,price CSV.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcare/and_dist.hpp"
#include "lcare/care.hpp"
#include "lcare/lpa.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic two-regime fixture generator"};
    std::string output = "data/fixture.csv";
    int n1 = 2000, n2 = 1000, burn = 100;
    std::uint64_t seed = 20240815;
    app.add_option("--output", output);
    app.add_option("--n1", n1, "regime-one length");
    app.add_option("--n2", n2, "regime-two length");
    app.add_option("--seed", seed);
    CLI11_PARSE(app, argc, argv);

    const double tau = 0.05;
    auto scenarios = lcare::ScenarioSet::builtin();
    lcare::CareParams p1 = scenarios.get(tau, "mid").params;
    // Center the intercept so the unconditional mean return is near zero.
    lcare::AndParams innov1{0.0, p1.sigma_eps, tau};
    p1.alpha[0] = -lcare::and_mean(innov1);

    // The break widens the innovation scale by half and moves the intercept
    // with it; the drift stays near zero in both regimes so the price path is
    // well behaved over the full sample.
    lcare::CareParams p2 = p1;
    p2.sigma_eps = 0.003;
    lcare::AndParams innov2{0.0, p2.sigma_eps, tau};
    p2.alpha[0] = -lcare::and_mean(innov2);

    std::mt19937_64 rng(seed);
    std::vector<double> y;
    y.reserve(static_cast<std::size_t>(n1 + n2));
    std::vector<double> buf(static_cast<std::size_t>(burn + n1 + n2), 0.0);
    for (int t = 0; t < burn + n1 + n2; ++t) {
        const bool second = t >= burn + n1;
        const lcare::CareParams& p = second ? p2 : p1;
        const lcare::AndParams& innov = second ? innov2 : innov1;
        double e = t >= 3 ? lcare::care_expectile_at(p, buf, t) : p.alpha[0];
        buf[static_cast<std::size_t>(t)] = e + lcare::and_sample_one(innov, rng);
        if (t >= burn) y.push_back(buf[static_cast<std::size_t>(t)]);
    }

    using namespace std::chrono;
    sys_days day{year{2014} / January / 6}; // a Monday
    auto next_weekday = [&] {
        day += days{1};
        weekday wd{day};
        if (wd == Saturday) day += days{2};
        if (wd == Sunday) day += days{1};
    };

    std::ofstream out(output, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << output << "\n";
        return 1;
    }
    out << "date,price\n";
    double price = 1000.0;
    auto emit = [&] {
        year_month_day ymd{day};
        char buf_line[64];
        std::snprintf(buf_line, sizeof(buf_line), "%04d-%02u-%02u,%.6f\n",
                      static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()), price);
        out << buf_line;
    };
    emit();
    for (double r : y) {
        price *= 1.0 + r;
        next_weekday();
        emit();
    }
    std::cerr << "wrote " << output << " with " << y.size() + 1 << " rows, break at return index "
              << n1 << "\n";
    return 0;
}
