// Test-only data generators and oracles. Nothing here calls into the
// library's numerical code, so the checks built on it stay independent.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace fixtures {

/// Zero-mean GARCH(1,1) returns started at the unconditional variance.
inline std::vector<double> simulate_garch(double omega, double alpha, double beta, std::size_t n,
                                          std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<double> r(n);
    double variance = omega / (1.0 - alpha - beta);
    double prev = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) variance = omega + alpha * prev * prev + beta * variance;
        r[t] = std::sqrt(variance) * normal(gen);
        prev = r[t];
    }
    return r;
}

inline std::vector<double> iid_normal(std::size_t n, double variance, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance));
    std::vector<double> r(n);
    for (auto& x : r) x = normal(gen);
    return r;
}

inline std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(gen);
    return v;
}

/// Textbook Pearson correlation.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

/// Correlation matrix of `k` columns built from random mixed data; positive
/// definite with probability one.
inline std::vector<std::vector<double>> random_correlation(std::size_t k, std::uint64_t seed) {
    const std::size_t n = 400;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<double> common(n);
    for (auto& c : common) c = normal(gen);
    std::vector<std::vector<double>> cols(k, std::vector<double>(n));
    for (std::size_t j = 0; j < k; ++j) {
        const double load = 0.3 + 0.5 * static_cast<double>(j) / static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i) cols[j][i] = load * common[i] + normal(gen);
    }
    std::vector<std::vector<double>> rho(k, std::vector<double>(k, 1.0));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (a != b) rho[a][b] = pearson(cols[a], cols[b]);
    return rho;
}

/// Standard normal quantile by bisection on erfc; independent of Boost.
inline double normal_quantile(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
        (cdf < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("volvar_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path) << text;
}

/// Writes `date,close` rows for consecutive days starting 2022-01-01, with
/// closes = start * exp(cumsum(returns)).
inline void write_price_csv(const std::filesystem::path& path, double start,
                            const std::vector<double>& returns) {
    std::ofstream out(path);
    out << "date,close\n";
    out.precision(17);
    int y = 2022, m = 1, d = 1;
    auto emit = [&](double close) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
        out << buf << ',' << close << '\n';
        static const int days_in[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        const int len = days_in[m - 1] + (m == 2 && leap ? 1 : 0);
        if (++d > len) {
            d = 1;
            if (++m > 12) {
                m = 1;
                ++y;
            }
        }
    };
    double price = start;
    emit(price);
    for (const double r : returns) {
        price *= std::exp(r);
        emit(price);
    }
}

} // namespace fixtures
