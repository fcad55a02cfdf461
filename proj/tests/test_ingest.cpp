#include "fixtures.hpp"

#include "volvar/errors.hpp"
#include "volvar/ingest.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace volvar;
using namespace volvar::ingest;

namespace {

PriceSeries parse(const std::string& text) {
    std::istringstream in(text);
    return parse_prices(in, "x", "test.csv");
}

PriceSeries series_of(std::vector<double> closes) {
    PriceSeries p;
    p.asset_id = "x";
    std::chrono::sys_days day = std::chrono::year{2024} / 1 / 1;
    for (std::size_t i = 0; i < closes.size(); ++i) p.timestamps.emplace_back(day + std::chrono::days{i});
    p.closes = std::move(closes);
    return p;
}

} // namespace

TEST_CASE("dates parse strictly") {
    CHECK(format_date(parse_date("2024-02-29")) == "2024-02-29");
    CHECK_THROWS_AS(parse_date("2023-02-29"), ParseError);
    CHECK_THROWS_AS(parse_date("2024-1-01"), ParseError);
    CHECK_THROWS_AS(parse_date("2024-01-01x"), ParseError);
    CHECK_THROWS_AS(parse_date(""), ParseError);
}

TEST_CASE("minimal well-formed CSV") {
    const auto p = parse("date,close\n2024-01-01,100.0\n2024-01-02,110.0\n");
    REQUIRE(p.size() == 2);
    CHECK(p.closes[0] == 100.0);
    CHECK(p.closes[1] == 110.0);
    CHECK(format_date(p.timestamps[1]) == "2024-01-02");
}

TEST_CASE("header columns are found by name and extra columns ignored") {
    const auto p = parse("\xEF\xBB\xBFOpen, Close ,Volume,Date\n1,\"5.5\",9,2024-03-01\r\n2,6,9,2024-03-02\r\n");
    REQUIRE(p.size() == 2);
    CHECK(p.closes[0] == 5.5);
    CHECK(p.closes[1] == 6.0);
}

TEST_CASE("rows out of order come back sorted") {
    std::vector<std::pair<std::string, double>> rows = {
        {"2024-01-05", 5}, {"2024-01-02", 2}, {"2024-01-04", 4}, {"2024-01-01", 1}, {"2024-01-03", 3}};
    std::string text = "date,close\n";
    for (const auto& [d, c] : rows) text += d + "," + std::to_string(c) + "\n";
    auto expected = rows;
    std::sort(expected.begin(), expected.end());

    const auto p = parse(text);
    REQUIRE(p.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(format_date(p.timestamps[i]) == expected[i].first);
        CHECK(p.closes[i] == expected[i].second);
    }
}

TEST_CASE("invalid content is rejected") {
    CHECK_THROWS_AS(parse("date,close\n2024-01-01,100\n2024-01-02,0\n"), ValidationError);
    CHECK_THROWS_AS(parse("date,close\n2024-01-01,100\n2024-01-02,-3\n"), ValidationError);
    CHECK_THROWS_AS(parse("date,close\n2024-01-01,100\n2024-01-01,101\n"), ValidationError);
    CHECK_THROWS_AS(parse("date,close\n2024-01-01,100\n"), ValidationError);
    CHECK_THROWS_AS(parse("date,price\n2024-01-01,100\n2024-01-02,101\n"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("parse errors name the row") {
    try {
        parse("date,close\n2024-01-01,100\n2024-01-02,abc\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    try {
        parse("date,close\n2024-01-01,100\nnot-a-date,100\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
}

TEST_CASE("load_prices reads files and reports missing ones") {
    fixtures::TempDir dir("ingest");
    fixtures::write_text(dir / "a.csv", "date,close\n2024-01-02,2\n2024-01-01,1\n");
    const auto p = load_prices(dir / "a.csv", "a");
    CHECK(p.asset_id == "a");
    CHECK(p.closes == std::vector<double>{1.0, 2.0});
    CHECK_THROWS_AS(load_prices(dir / "missing.csv", "m"), Error);
}

TEST_CASE("log return examples") {
    CHECK(log_returns(series_of({100, 100})).returns == std::vector<double>{0.0});
    CHECK(log_returns(series_of({100, 110})).returns[0] == doctest::Approx(0.0953102).epsilon(1e-6));
    const auto r = log_returns(series_of({100, 50, 100})).returns;
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(std::abs(r[0] + r[1]) < 1e-15);
    CHECK_THROWS(log_returns(series_of({100})));
}

TEST_CASE("log returns timestamp the later close") {
    const auto r = log_returns(series_of({1, 2, 3}));
    CHECK(format_date(r.timestamps[0]) == "2024-01-02");
    CHECK(format_date(r.timestamps[1]) == "2024-01-03");
}

TEST_CASE("property: cumulative log returns reproduce the closes") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto n = 2 + seed * 7;
        auto closes = fixtures::uniform(n, 0.01, 5000.0, seed);
        const auto p = series_of(closes);
        const auto r = log_returns(p).returns;
        REQUIRE(r.size() == n - 1);
        double cum = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            cum += r[i];
            const double rebuilt = closes[0] * std::exp(cum);
            CHECK(std::abs(rebuilt - closes[i + 1]) <= 1e-12 * closes[i + 1] * (1.0 + i * 1e-2));
        }
    }
}

TEST_CASE("write_prices round-trips exactly") {
    const auto p = series_of(fixtures::uniform(40, 0.001, 90000.0, 3));
    std::ostringstream out;
    write_prices(out, p);
    std::istringstream in(out.str());
    const auto back = parse_prices(in, "x");
    CHECK(back.closes == p.closes);
    CHECK(back.timestamps == p.timestamps);
}

TEST_CASE("sample statistics") {
    const std::vector<double> v{1, 2, 3, 4};
    CHECK(sample_mean(v) == 2.5);
    CHECK(sample_variance(v) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS(sample_variance(std::vector<double>{1.0}));
}

TEST_CASE("align_and_stats examples") {
    SUBCASE("single series") {
        const auto s = align_and_stats({make_return_series("a", {0.01, -0.02, 0.03})});
        CHECK(s.correlation == Matrix::from_rows({{1.0}}));
        CHECK(s.variances[0] == doctest::Approx(0.0019 / 3.0).epsilon(1e-12));
    }
    SUBCASE("identical series") {
        const auto a = make_return_series("a", {0.01, -0.02, 0.03, 0.005});
        auto b = a;
        b.asset_id = "b";
        const auto s = align_and_stats({a, b});
        CHECK(s.correlation(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.correlation(0, 1) <= 1.0);
    }
    SUBCASE("anti-proportional series") {
        const auto s = align_and_stats({make_return_series("a", {0.01, -0.01, 0.02}),
                                        make_return_series("b", {-0.01, 0.01, -0.02})});
        CHECK(s.correlation(0, 1) == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(s.correlation(1, 0) == s.correlation(0, 1));
    }
}

TEST_CASE("align keeps only shared dates") {
    using namespace std::chrono;
    const auto a = make_return_series("a", {1, 2, 3, 4, 5}, year{2024} / 1 / 1);
    const auto b = make_return_series("b", {10, 20, 30, 40, 50}, year{2024} / 1 / 3);
    const auto aligned = align({a, b});
    CHECK(aligned[0].returns == std::vector<double>{3, 4, 5});
    CHECK(aligned[1].returns == std::vector<double>{10, 20, 30});
    const auto s = align_and_stats({a, b});
    CHECK(s.common_dates.size() == 3);
}

TEST_CASE("align_and_stats errors") {
    using namespace std::chrono;
    const auto a = make_return_series("a", {1, 2}, year{2024} / 1 / 1);
    const auto b = make_return_series("b", {1, 2}, year{2025} / 1 / 1);
    CHECK_THROWS_AS(align_and_stats({a, b}), ValidationError);
    CHECK_THROWS(align_and_stats({}));
    const auto flat = make_return_series("flat", {0.0, 0.0, 0.0});
    const auto c = make_return_series("c", {0.1, 0.2, 0.3});
    CHECK_THROWS_AS(align_and_stats({flat, c}), ValidationError);
}

TEST_CASE("property: align_and_stats is permutation-equivariant") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::vector<ReturnSeries> series;
        for (std::size_t k = 0; k < 4; ++k)
            series.push_back(make_return_series("s" + std::to_string(k),
                                                fixtures::iid_normal(60, 1e-4 * (k + 1), seed * 10 + k)));
        std::vector<std::size_t> perm{0, 1, 2, 3};
        std::mt19937_64 gen(seed);
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<ReturnSeries> permuted;
        for (const auto i : perm) permuted.push_back(series[i]);

        const auto base = align_and_stats(series);
        const auto moved = align_and_stats(permuted);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(moved.asset_ids[i] == base.asset_ids[perm[i]]);
            CHECK(moved.means[i] == base.means[perm[i]]);
            CHECK(moved.variances[i] == base.variances[perm[i]]);
            for (std::size_t j = 0; j < 4; ++j) CHECK(moved.correlation(i, j) == base.correlation(perm[i], perm[j]));
        }
    }
}

TEST_CASE("property: correlation matrix is symmetric with unit diagonal") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::vector<ReturnSeries> series;
        for (std::size_t k = 0; k < 3; ++k)
            series.push_back(make_return_series("s" + std::to_string(k), fixtures::iid_normal(30, 1e-4, seed * 7 + k)));
        const auto s = align_and_stats(series);
        CHECK(s.correlation.max_abs_diff(s.correlation.transpose()) == 0.0);
        for (std::size_t i = 0; i < 3; ++i) CHECK(s.correlation(i, i) == 1.0);
        CHECK(s.correlation(0, 1) == doctest::Approx(fixtures::pearson(series[0].returns, series[1].returns)).epsilon(1e-12));
    }
}

TEST_CASE("price sources") {
    fixtures::TempDir dir("source");
    fixtures::write_text(dir / "btc.csv", "date,close\n2024-01-01,1\n2024-01-02,2\n");
    auto csv = make_price_source("csv:" + dir.path().string());
    CHECK(csv->fetch("btc").closes.size() == 2);
    auto exchange = make_price_source("exchange:binance");
    CHECK_THROWS_AS(exchange->fetch("btc"), UnavailableError);
    CHECK_THROWS_AS(make_price_source("ftp:host"), Error);
}
