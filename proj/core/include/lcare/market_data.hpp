#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lcare/errors.hpp"

namespace lcare {

/// Calendar day, ISO-8601 text form. No calendar arithmetic is needed:
/// trading days are simply absent for holidays.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    static Date parse(std::string_view iso);
    std::string str() const;
};

/// Positive index levels, strictly increasing dates.
class PriceSeries {
public:
    static PriceSeries from_rows(std::vector<std::pair<Date, double>> rows);

    std::size_t size() const noexcept { return dates_.size(); }
    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<Date> dates_;
    std::vector<double> values_;
};

enum class ReturnKind { simple, log };

ReturnKind parse_return_kind(std::string_view name);
std::string_view to_string(ReturnKind kind);

/// Dated daily returns; dated by the later day of each price pair.
class ReturnSeries {
public:
    ReturnSeries() = default;
    ReturnSeries(std::vector<Date> dates, std::vector<double> values, ReturnKind kind);

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<double>& values() const noexcept { return values_; }
    ReturnKind kind() const noexcept { return kind_; }

private:
    std::vector<Date> dates_;
    std::vector<double> values_;
    ReturnKind kind_ = ReturnKind::simple;
};

ReturnSeries to_returns(const PriceSeries& prices, ReturnKind kind);

/// Kurtosis is non-excess (normal => 3); std uses the n-1 denominator.
struct SummaryStats {
    double mean = 0;
    double median = 0;
    double min = 0;
    double max = 0;
    double std = 0;
    double skewness = 0;
    double kurtosis = 0;
};

SummaryStats summarize(const ReturnSeries& returns);
SummaryStats summarize(const std::vector<double>& values);

/// Contiguous slice of exactly `length` observations ending at `end_index`.
ReturnSeries window(const ReturnSeries& returns, int end_index, int length);

struct CsvSpec {
    std::string date_col = "date";
    std::string price_col = "price";
};

/// Header row required; rows are sorted by date after parsing.
PriceSeries load_prices(std::istream& in, const CsvSpec& spec = {});

} // namespace lcare
