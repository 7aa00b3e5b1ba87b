#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lcare/market_data.hpp"

#include "test_util.hpp"

using namespace lcare;

TEST_CASE("date parsing round trips") {
    auto d = Date::parse("2016-03-09");
    CHECK(d.year == 2016);
    CHECK(d.month == 3);
    CHECK(d.day == 9);
    CHECK(d.str() == "2016-03-09");
    CHECK(Date{2016, 3, 9} < Date{2016, 3, 10});
    CHECK_THROWS_AS(Date::parse("2016/03/09"), Error);
    CHECK_THROWS_AS(Date::parse("2016-13-09"), Error);
    CHECK_THROWS_AS(Date::parse(""), Error);
}

TEST_CASE("price series validation") {
    CHECK_THROWS_AS(PriceSeries::from_rows({{Date{2016, 1, 4}, -1.0}}), NonPositivePrice);
    CHECK_THROWS_AS(PriceSeries::from_rows({{Date{2016, 1, 4}, 1.0}, {Date{2016, 1, 4}, 2.0}}),
                    DuplicateDate);
    auto p = PriceSeries::from_rows({{Date{2016, 1, 5}, 2.0}, {Date{2016, 1, 4}, 1.0}});
    CHECK(p.dates().front() == Date{2016, 1, 4});
    CHECK(p.values().front() == 1.0);
}

TEST_CASE("returns definitional") {
    auto p = PriceSeries::from_rows(
        {{Date{2016, 1, 4}, 100.0}, {Date{2016, 1, 5}, 110.0}, {Date{2016, 1, 6}, 99.0}});
    auto simple = to_returns(p, ReturnKind::simple);
    auto lg = to_returns(p, ReturnKind::log);
    REQUIRE(simple.size() == 2);
    CHECK(simple.values()[0] == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(simple.values()[1] == doctest::Approx(-0.10).epsilon(1e-12));
    CHECK(lg.values()[0] == doctest::Approx(std::log(1.1)).epsilon(1e-12));
    CHECK(simple.dates()[0] == Date{2016, 1, 5});
    CHECK(simple.values()[0] != lg.values()[0]);
}

TEST_CASE("summary statistics against a brute-force oracle") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
        auto v = testutil::gaussian_series(37 + 211 * seed % 1000, 0.01, seed);
        auto s = summarize(v);

        const double n = static_cast<double>(v.size());
        double mean = 0;
        for (double x : v) mean += x;
        mean /= n;
        double m2 = 0, m3 = 0, m4 = 0;
        for (double x : v) {
            double d = x - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                          : 0.5 * (sorted[sorted.size() / 2 - 1] +
                                                   sorted[sorted.size() / 2]);

        CHECK(s.mean == doctest::Approx(mean).epsilon(1e-10));
        CHECK(s.median == doctest::Approx(median).epsilon(1e-10));
        CHECK(s.min == sorted.front());
        CHECK(s.max == sorted.back());
        CHECK(s.std == doctest::Approx(std::sqrt(m2 * n / (n - 1))).epsilon(1e-10));
        CHECK(s.skewness == doctest::Approx(m3 / std::pow(m2, 1.5)).epsilon(1e-10));
        CHECK(s.kurtosis == doctest::Approx(m4 / (m2 * m2)).epsilon(1e-10));
    }
}

TEST_CASE("summarize rejects degenerate input") {
    CHECK_THROWS_AS(summarize(std::vector<double>{0.01, 0.01, 0.01}), DegenerateVariance);
    CHECK_THROWS_AS(summarize(std::vector<double>{}), InsufficientData);
}

TEST_CASE("window slicing") {
    std::vector<Date> dates;
    std::vector<double> vals;
    for (int i = 0; i < 10; ++i) {
        dates.push_back(Date{2016, 1, i + 1});
        vals.push_back(i);
    }
    ReturnSeries rs(dates, vals, ReturnKind::simple);
    auto w = window(rs, 7, 3);
    REQUIRE(w.size() == 3);
    CHECK(w.values()[0] == 5);
    CHECK(w.values()[2] == 7);
    CHECK_THROWS_AS(window(rs, 1, 3), IndexError);
    CHECK_THROWS_AS(window(rs, 12, 3), IndexError);
}

TEST_CASE("csv loading") {
    std::istringstream good("date,price\n2016-01-05,101.5\n2016-01-04,100\n");
    auto p = load_prices(good);
    REQUIRE(p.size() == 2);
    CHECK(p.values()[0] == 100.0);

    std::istringstream renamed("Day,Close\n2016-01-04,100\n");
    CHECK(load_prices(renamed, {"Day", "Close"}).size() == 1);

    std::istringstream empty("");
    CHECK_THROWS_AS(load_prices(empty), ParseError);

    std::istringstream missing_col("date,notprice\n2016-01-04,100\n");
    CHECK_THROWS_AS(load_prices(missing_col), ParseError);

    std::istringstream bad_row("date,price\n2016-01-04,abc\n");
    CHECK_THROWS_AS(load_prices(bad_row), MalformedRow);
}
