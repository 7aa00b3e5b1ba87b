#include "lcare/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

namespace lcare {

Date Date::parse(std::string_view iso) {
    Date d;
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw Error("invalid ISO-8601 date: " + std::string(iso));
    auto num = [&](std::size_t pos, std::size_t n) {
        int v = 0;
        auto first = iso.data() + pos;
        auto [p, ec] = std::from_chars(first, first + n, v);
        if (ec != std::errc() || p != first + n)
            throw Error("invalid ISO-8601 date: " + std::string(iso));
        return v;
    };
    d.year = num(0, 4);
    d.month = num(5, 2);
    d.day = num(8, 2);
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
        throw Error("invalid calendar day: " + std::string(iso));
    return d;
}

std::string Date::str() const {
    char buf[11];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

PriceSeries PriceSeries::from_rows(std::vector<std::pair<Date, double>> rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    PriceSeries out;
    out.dates_.reserve(rows.size());
    out.values_.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [date, price] = rows[i];
        if (!(price > 0) || !std::isfinite(price))
            throw NonPositivePrice("non-positive price " + std::to_string(price), i + 1);
        if (!out.dates_.empty() && out.dates_.back() == date)
            throw DuplicateDate("duplicate date " + date.str(), i + 1);
        out.dates_.push_back(date);
        out.values_.push_back(price);
    }
    return out;
}

ReturnKind parse_return_kind(std::string_view name) {
    if (name == "simple") return ReturnKind::simple;
    if (name == "log") return ReturnKind::log;
    throw Error("unknown return kind: " + std::string(name));
}

std::string_view to_string(ReturnKind kind) {
    return kind == ReturnKind::simple ? "simple" : "log";
}

ReturnSeries::ReturnSeries(std::vector<Date> dates, std::vector<double> values, ReturnKind kind)
    : dates_(std::move(dates)), values_(std::move(values)), kind_(kind) {
    if (dates_.size() != values_.size())
        throw AlignmentError("return dates and values differ in length");
    for (double v : values_)
        if (!std::isfinite(v)) throw Error("non-finite return value");
}

ReturnSeries to_returns(const PriceSeries& prices, ReturnKind kind) {
    if (prices.size() < 2)
        throw InsufficientData("need at least 2 prices to form returns");
    std::vector<Date> dates(prices.dates().begin() + 1, prices.dates().end());
    std::vector<double> values(prices.size() - 1);
    const auto& p = prices.values();
    for (std::size_t t = 1; t < prices.size(); ++t) {
        double ratio = p[t] / p[t - 1];
        values[t - 1] = kind == ReturnKind::simple ? ratio - 1.0 : std::log(ratio);
    }
    return ReturnSeries(std::move(dates), std::move(values), kind);
}

SummaryStats summarize(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n == 0) throw InsufficientData("empty series");

    SummaryStats s;
    double sum = 0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(n);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : values) {
        double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    if (n < 2 || m2 == 0)
        throw DegenerateVariance("zero sample variance, skewness/kurtosis undefined");

    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
    return s;
}

SummaryStats summarize(const ReturnSeries& returns) {
    return summarize(returns.values());
}

ReturnSeries window(const ReturnSeries& returns, int end_index, int length) {
    if (length < 1 || end_index < 0 || end_index >= static_cast<int>(returns.size()) ||
        end_index - length + 1 < 0)
        throw IndexError("window [end=" + std::to_string(end_index) +
                         ", len=" + std::to_string(length) + "] out of range");
    int first = end_index - length + 1;
    std::vector<Date> dates(returns.dates().begin() + first,
                            returns.dates().begin() + end_index + 1);
    std::vector<double> values(returns.values().begin() + first,
                               returns.values().begin() + end_index + 1);
    return ReturnSeries(std::move(dates), std::move(values), returns.kind());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        auto b = f.find_first_not_of(" \t");
        auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

} // namespace

PriceSeries load_prices(std::istream& in, const CsvSpec& spec) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty input, header row required", 0);

    auto header = split_csv_line(line);
    auto find_col = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ParseError("column '" + name + "' not found in header", 1);
        return static_cast<std::size_t>(it - header.begin());
    };
    std::size_t date_idx = find_col(spec.date_col);
    std::size_t price_idx = find_col(spec.price_col);

    std::vector<std::pair<Date, double>> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() <= std::max(date_idx, price_idx))
            throw MalformedRow("too few columns", row_no);
        Date date;
        double price = 0;
        try {
            date = Date::parse(fields[date_idx]);
        } catch (const Error&) {
            throw MalformedRow("unparseable date '" + fields[date_idx] + "'", row_no);
        }
        const std::string& ps = fields[price_idx];
        auto [p, ec] = std::from_chars(ps.data(), ps.data() + ps.size(), price);
        if (ec != std::errc() || p != ps.data() + ps.size())
            throw MalformedRow("unparseable price '" + ps + "'", row_no);
        if (!(price > 0))
            throw NonPositivePrice("non-positive price " + ps, row_no);
        rows.emplace_back(date, price);
    }
    return PriceSeries::from_rows(std::move(rows));
}

} // namespace lcare
