// Writes synthetic daily close series with GARCH(1,1) volatility clustering
// and a fixed cross-asset correlation, one CSV per asset. Used for the demo
// data under data/synthetic; not part of the engine.

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <chrono>
#include <random>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App cli{"Synthetic correlated GARCH(1,1) price generator"};
    std::string out_dir = "data/synthetic";
    std::size_t days = 1000;
    std::uint64_t seed = 7;
    cli.add_option("--out", out_dir, "Output directory");
    cli.add_option("--days", days, "Number of daily closes");
    cli.add_option("--seed", seed, "RNG seed");
    CLI11_PARSE(cli, argc, argv);

    struct Asset {
        const char* id;
        double start;
        double drift;  // daily
        double omega, alpha, beta;
    };
    const std::array<Asset, 3> assets{{
        {"asset_a", 0.52, 0.0004, 2.0e-5, 0.10, 0.86},
        {"asset_b", 95.0, 0.0012, 4.0e-5, 0.12, 0.84},
        {"asset_c", 0.38, 0.0002, 3.0e-5, 0.09, 0.87},
    }};
    // Lower Cholesky factor of [[1, .6, .5], [.6, 1, .55], [.5, .55, 1]].
    const double l10 = 0.6, l11 = 0.8;
    const double l20 = 0.5, l21 = (0.55 - 0.5 * 0.6) / 0.8;
    const double l22 = std::sqrt(1.0 - l20 * l20 - l21 * l21);

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::array<double, 3> price{}, variance{}, last_shock{};
    for (std::size_t i = 0; i < 3; ++i) {
        price[i] = assets[i].start;
        variance[i] = assets[i].omega / (1.0 - assets[i].alpha - assets[i].beta);
    }

    std::filesystem::create_directories(out_dir);
    std::array<std::ofstream, 3> files;
    for (std::size_t i = 0; i < 3; ++i) {
        files[i].open(std::filesystem::path(out_dir) / (std::string(assets[i].id) + ".csv"));
        files[i] << "date,open,close,volume\n" << std::setprecision(10);
    }

    using namespace std::chrono;
    sys_days day = year{2021} / January / 1;
    for (std::size_t t = 0; t < days; ++t, day += std::chrono::days{1}) {
        const year_month_day ymd{day};
        std::ostringstream date;
        date << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-'
             << std::setw(2) << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2)
             << static_cast<unsigned>(ymd.day());

        const double e0 = normal(gen), e1 = normal(gen), e2 = normal(gen);
        const std::array<double, 3> z{e0, l10 * e0 + l11 * e1, l20 * e0 + l21 * e1 + l22 * e2};
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& a = assets[i];
            if (t > 0) {
                variance[i] = a.omega + a.alpha * last_shock[i] * last_shock[i] + a.beta * variance[i];
                last_shock[i] = std::sqrt(variance[i]) * z[i];
                const double open = price[i];
                price[i] *= std::exp(a.drift + last_shock[i]);
                files[i] << date.str() << ',' << open << ',' << price[i] << ",0\n";
            } else {
                files[i] << date.str() << ',' << price[i] << ',' << price[i] << ",0\n";
            }
        }
    }
    std::cout << "wrote " << days << " days for 3 assets to " << out_dir << '\n';
    return 0;
}
