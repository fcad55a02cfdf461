/**
 * @file ingest.hpp
 * @brief Daily price loading, log-returns and cross-asset sample statistics.
 *
 * Input files are one CSV per asset with a header row naming at least a
 * `date` column (YYYY-MM-DD) and a `close` column. Extra columns are ignored.
 * Rows may arrive in any order; the loaded series is sorted by date and then
 * validated (strictly positive closes, no duplicate dates, at least 2 rows).
 *
 * Cross-asset statistics are computed on the strict intersection of the
 * return dates of all inputs. Calendar days are used as-is: crypto markets
 * trade every day, so there is no business-day calendar.
 */
#pragma once

#include "volvar/matrix.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace volvar::ingest {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws ParseError.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

struct PriceSeries {
    std::string asset_id;
    std::vector<Date> timestamps;
    std::vector<double> closes;

    [[nodiscard]] std::size_t size() const noexcept { return closes.size(); }
};

struct ReturnSeries {
    std::string asset_id;
    std::vector<Date> timestamps;  ///< date of the later close of each pair
    std::vector<double> returns;

    [[nodiscard]] std::size_t size() const noexcept { return returns.size(); }
};

struct CrossStats {
    std::vector<std::string> asset_ids;
    std::vector<double> means;      ///< daily mean log-return
    std::vector<double> variances;  ///< unbiased (n-1) sample variance, daily
    Matrix correlation;
    std::vector<Date> common_dates;
};

/// Checks the PriceSeries invariants; throws ValidationError naming the asset.
void validate(const PriceSeries& prices);

/// Parses CSV text. `source` names the input in error messages.
PriceSeries parse_prices(std::istream& in, const std::string& asset_id,
                         const std::string& source = "<stream>");

PriceSeries load_prices(const std::filesystem::path& path, const std::string& asset_id);

/// Writes a normalized `date,close` CSV with round-trip precision.
void write_prices(std::ostream& out, const PriceSeries& prices);

ReturnSeries log_returns(const PriceSeries& prices);

/// Builds a ReturnSeries over consecutive synthetic dates starting at `start`.
/// Used for simulated data and in tests.
ReturnSeries make_return_series(std::string asset_id, std::vector<double> returns,
                                Date start = Date{std::chrono::year{2020}, std::chrono::January,
                                                  std::chrono::day{2}});

/// Unbiased sample mean and variance.
double sample_mean(std::span<const double> values);
double sample_variance(std::span<const double> values);

/// Restricts every series to the dates they all share.
std::vector<ReturnSeries> align(const std::vector<ReturnSeries>& series);

CrossStats align_and_stats(const std::vector<ReturnSeries>& series);

/// Source of daily prices for one asset.
class PriceSource {
public:
    virtual ~PriceSource() = default;
    virtual PriceSeries fetch(const std::string& asset_id) = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

/// Reads `<directory>/<asset_id>.csv`.
class CsvPriceSource final : public PriceSource {
public:
    explicit CsvPriceSource(std::filesystem::path directory) : directory_(std::move(directory)) {}

    PriceSeries fetch(const std::string& asset_id) override;
    [[nodiscard]] std::string name() const override { return "csv"; }

private:
    std::filesystem::path directory_;
};

/// Placeholder for a live exchange client. Every fetch throws UnavailableError.
class ExchangePriceSource final : public PriceSource {
public:
    explicit ExchangePriceSource(std::string exchange) : exchange_(std::move(exchange)) {}

    PriceSeries fetch(const std::string& asset_id) override;
    [[nodiscard]] std::string name() const override { return "exchange:" + exchange_; }

private:
    std::string exchange_;
};

/// "csv:<dir>" or "exchange:<name>".
std::unique_ptr<PriceSource> make_price_source(const std::string& locator);

} // namespace volvar::ingest
