#include "volvar/ingest.hpp"

#include "volvar/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace volvar::ingest {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n\"";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

int parse_int(std::string_view text, std::string_view whole) {
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("invalid date '" + std::string(whole) + "'");
    }
    return value;
}

} // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ParseError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    const Date date{std::chrono::year{parse_int(text.substr(0, 4), text)},
                    std::chrono::month{static_cast<unsigned>(parse_int(text.substr(5, 2), text))},
                    std::chrono::day{static_cast<unsigned>(parse_int(text.substr(8, 2), text))}};
    if (!date.ok()) throw ParseError("invalid calendar date '" + std::string(text) + "'");
    return date;
}

std::string format_date(const Date& date) {
    std::ostringstream out;
    out << std::setfill('0') << std::setw(4) << static_cast<int>(date.year()) << '-'
        << std::setw(2) << static_cast<unsigned>(date.month()) << '-' << std::setw(2)
        << static_cast<unsigned>(date.day());
    return out.str();
}

void validate(const PriceSeries& prices) {
    const auto& id = prices.asset_id;
    if (prices.timestamps.size() != prices.closes.size()) {
        throw ValidationError(id + ": timestamps and closes differ in length");
    }
    if (prices.size() < 2) {
        throw ValidationError(id + ": need at least 2 prices, got " +
                              std::to_string(prices.size()));
    }
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices.closes[i] > 0.0) || !std::isfinite(prices.closes[i])) {
            throw ValidationError(id + ": non-positive close on " +
                                  format_date(prices.timestamps[i]));
        }
        if (i > 0 && !(prices.timestamps[i - 1] < prices.timestamps[i])) {
            throw ValidationError(id + ": duplicate or unordered date " +
                                  format_date(prices.timestamps[i]));
        }
    }
}

PriceSeries parse_prices(std::istream& in, const std::string& asset_id,
                         const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::ptrdiff_t date_col = -1;
    std::ptrdiff_t close_col = -1;

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        const auto header = split_row(line);
        for (std::size_t c = 0; c < header.size(); ++c) {
            const auto name = lower(header[c]);
            if (name == "date") date_col = static_cast<std::ptrdiff_t>(c);
            if (name == "close") close_col = static_cast<std::ptrdiff_t>(c);
        }
        break;
    }
    if (date_col < 0 || close_col < 0) {
        throw ParseError(source + ": header must contain 'date' and 'close' columns");
    }

    std::vector<std::pair<Date, double>> rows;
    const auto needed = static_cast<std::size_t>(std::max(date_col, close_col)) + 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_row(line);
        const auto where = source + " row " + std::to_string(line_no);
        if (fields.size() < needed) {
            throw ParseError(where + ": expected at least " + std::to_string(needed) +
                             " columns, got " + std::to_string(fields.size()));
        }
        Date date;
        try {
            date = parse_date(fields[static_cast<std::size_t>(date_col)]);
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        const auto text = fields[static_cast<std::size_t>(close_col)];
        double close = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), close);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ParseError(where + ": invalid close '" + std::string(text) + "'");
        }
        rows.emplace_back(date, close);
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    PriceSeries prices{asset_id, {}, {}};
    prices.timestamps.reserve(rows.size());
    prices.closes.reserve(rows.size());
    for (const auto& [date, close] : rows) {
        prices.timestamps.push_back(date);
        prices.closes.push_back(close);
    }
    validate(prices);
    return prices;
}

PriceSeries load_prices(const std::filesystem::path& path, const std::string& asset_id) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open price file " + path.string());
    return parse_prices(in, asset_id, path.string());
}

void write_prices(std::ostream& out, const PriceSeries& prices) {
    out << "date,close\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < prices.size(); ++i) {
        out << format_date(prices.timestamps[i]) << ',' << prices.closes[i] << '\n';
    }
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.size() < 2) {
        throw ValidationError(prices.asset_id + ": need at least 2 prices for a return");
    }
    ReturnSeries out{prices.asset_id, {}, {}};
    out.timestamps.assign(prices.timestamps.begin() + 1, prices.timestamps.end());
    out.returns.reserve(prices.size() - 1);
    for (std::size_t i = 0; i + 1 < prices.size(); ++i) {
        const double r = std::log(prices.closes[i + 1] / prices.closes[i]);
        if (!std::isfinite(r)) {
            throw ValidationError(prices.asset_id + ": non-finite return on " +
                                  format_date(prices.timestamps[i + 1]));
        }
        out.returns.push_back(r);
    }
    return out;
}

ReturnSeries make_return_series(std::string asset_id, std::vector<double> returns, Date start) {
    ReturnSeries out{std::move(asset_id), {}, std::move(returns)};
    out.timestamps.reserve(out.returns.size());
    std::chrono::sys_days day{start};
    for (std::size_t i = 0; i < out.returns.size(); ++i, day += std::chrono::days{1}) {
        out.timestamps.emplace_back(day);
    }
    return out;
}

double sample_mean(std::span<const double> values) {
    if (values.empty()) throw ValidationError("mean of an empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) throw ValidationError("sample variance needs at least 2 values");
    const double mean = sample_mean(values);
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size() - 1);
}

std::vector<ReturnSeries> align(const std::vector<ReturnSeries>& series) {
    if (series.empty()) throw ValidationError("no return series to align");
    std::vector<Date> common = series.front().timestamps;
    for (std::size_t k = 1; k < series.size(); ++k) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), series[k].timestamps.begin(),
                              series[k].timestamps.end(), std::back_inserter(next));
        common = std::move(next);
    }

    std::vector<ReturnSeries> out;
    out.reserve(series.size());
    for (const auto& s : series) {
        ReturnSeries aligned{s.asset_id, common, {}};
        aligned.returns.reserve(common.size());
        std::size_t j = 0;
        for (const auto& date : common) {
            while (s.timestamps[j] < date) ++j;
            aligned.returns.push_back(s.returns[j]);
        }
        out.push_back(std::move(aligned));
    }
    return out;
}

CrossStats align_and_stats(const std::vector<ReturnSeries>& series) {
    const auto aligned = align(series);
    const auto& dates = aligned.front().timestamps;
    if (dates.size() < 2) {
        throw ValidationError("common date window has " + std::to_string(dates.size()) +
                              " dates, need at least 2");
    }

    const std::size_t n = aligned.size();
    CrossStats stats;
    stats.common_dates = dates;
    stats.correlation = Matrix(n, n);
    for (const auto& s : aligned) {
        stats.asset_ids.push_back(s.asset_id);
        stats.means.push_back(sample_mean(s.returns));
        stats.variances.push_back(sample_variance(s.returns));
        if (aligned.size() > 1 && !(stats.variances.back() > 0.0)) {
            throw ValidationError(s.asset_id + ": zero variance, correlation undefined");
        }
    }

    const auto count = static_cast<double>(dates.size());
    for (std::size_t a = 0; a < n; ++a) {
        stats.correlation(a, a) = 1.0;
        for (std::size_t b = a + 1; b < n; ++b) {
            double cov = 0.0;
            for (std::size_t t = 0; t < dates.size(); ++t) {
                cov += (aligned[a].returns[t] - stats.means[a]) *
                       (aligned[b].returns[t] - stats.means[b]);
            }
            cov /= count - 1.0;
            const double rho = std::clamp(
                cov / std::sqrt(stats.variances[a] * stats.variances[b]), -1.0, 1.0);
            stats.correlation(a, b) = rho;
            stats.correlation(b, a) = rho;
        }
    }
    return stats;
}

PriceSeries CsvPriceSource::fetch(const std::string& asset_id) {
    return load_prices(directory_ / (asset_id + ".csv"), asset_id);
}

PriceSeries ExchangePriceSource::fetch(const std::string& asset_id) {
    throw UnavailableError("price source '" + name() + "' has no live client; cannot fetch " +
                           asset_id);
}

std::unique_ptr<PriceSource> make_price_source(const std::string& locator) {
    const auto colon = locator.find(':');
    const auto scheme = locator.substr(0, colon);
    const auto rest = colon == std::string::npos ? std::string{} : locator.substr(colon + 1);
    if (scheme == "csv") return std::make_unique<CsvPriceSource>(rest.empty() ? "." : rest);
    if (scheme == "exchange") return std::make_unique<ExchangePriceSource>(rest);
    throw ParameterError("unknown price source '" + locator + "', expected csv:<dir> or exchange:<name>");
}

} // namespace volvar::ingest
