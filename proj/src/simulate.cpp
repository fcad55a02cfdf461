#include "volvar/simulate.hpp"

#include "volvar/errors.hpp"
#include "volvar/parallel.hpp"
#include "volvar/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace volvar::sim {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kSemidefiniteTolerance = 1e-12;

void apply_lower(const Matrix& lower, const double* eps, double* z) {
    const std::size_t n = lower.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= i; ++k) acc += lower(i, k) * eps[k];
        z[i] = acc;
    }
}

} // namespace

CholeskyFactor cholesky(const Matrix& correlation, Definiteness mode) {
    if (!correlation.square() || correlation.rows() == 0) {
        throw ParameterError("correlation matrix must be square and non-empty");
    }
    const std::size_t n = correlation.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(correlation(i, i) - 1.0) > kSymmetryTolerance) {
            throw ParameterError("correlation diagonal must be 1 (row " + std::to_string(i) + ")");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(correlation(i, j) - correlation(j, i)) > kSymmetryTolerance) {
                throw ParameterError("correlation matrix is not symmetric");
            }
        }
    }

    Matrix lower(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = correlation(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);

        if (!(pivot > 0.0)) {
            const bool tolerated =
                mode == Definiteness::Semidefinite && pivot > -kSemidefiniteTolerance;
            if (!tolerated) {
                throw DecompositionError("correlation matrix is not positive definite: leading minor " +
                                             std::to_string(j + 1) + " has pivot " +
                                             std::to_string(pivot),
                                         j + 1);
            }
            continue;  // zero column
        }
        if (mode == Definiteness::Semidefinite && pivot <= kSemidefiniteTolerance) continue;

        const double diag = std::sqrt(pivot);
        lower(j, j) = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = correlation(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= lower(i, k) * lower(j, k);
            lower(i, j) = acc / diag;
        }
    }
    return CholeskyFactor{std::move(lower)};
}

void validate(const SimulationConfig& config, std::size_t n_assets) {
    if (config.n_paths < 1) throw ParameterError("n_paths must be >= 1");
    if (config.horizon_days < 1) throw ParameterError("horizon_days must be >= 1");
    if (!(config.annualization_days > 0.0)) throw ParameterError("annualization_days must be > 0");
    if (!(config.initial_portfolio_value > 0.0)) {
        throw ParameterError("initial portfolio value must be > 0");
    }
    if (config.weights.size() != n_assets || config.drifts.size() != n_assets ||
        config.vols.size() != n_assets) {
        throw ParameterError("dimension mismatch: correlation has " + std::to_string(n_assets) +
                             " assets, weights/drifts/vols have " +
                             std::to_string(config.weights.size()) + "/" +
                             std::to_string(config.drifts.size()) + "/" +
                             std::to_string(config.vols.size()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n_assets; ++i) {
        if (!(config.weights[i] >= 0.0)) throw ParameterError("weights must be >= 0");
        if (!(config.vols[i] >= 0.0) || !std::isfinite(config.vols[i])) {
            throw ParameterError("volatilities must be finite and >= 0");
        }
        if (!std::isfinite(config.drifts[i])) throw ParameterError("drifts must be finite");
        total += config.weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ParameterError("weights must sum to 1, got " + std::to_string(total));
    }
}

AssetGrowth simulate_asset_growth(const SimulationConfig& config, const CholeskyFactor& chol,
                                  std::size_t threads) {
    const std::size_t n = chol.size();
    validate(config, n);

    const double dt = 1.0 / config.annualization_days;
    const double sqrt_dt = std::sqrt(dt);
    std::vector<double> drift_step(n);
    std::vector<double> vol_step(n);
    for (std::size_t i = 0; i < n; ++i) {
        drift_step[i] = (config.drifts[i] - 0.5 * config.vols[i] * config.vols[i]) * dt;
        vol_step[i] = config.vols[i] * sqrt_dt;
    }

    AssetGrowth out{config.n_paths, n, std::vector<double>(config.n_paths * n)};
    parallel_for(config.n_paths, threads, [&](std::size_t begin, std::size_t end) {
        // Draw step * n + i is asset i's independent normal at `step`.
        std::vector<double> eps(config.horizon_days * n);
        std::vector<double> z(n);
        std::vector<double> log_growth(n);
        for (std::size_t p = begin; p < end; ++p) {
            rng::PathNormals(config.seed, p).fill(0, eps.data(), eps.size());
            std::fill(log_growth.begin(), log_growth.end(), 0.0);
            for (std::size_t step = 0; step < config.horizon_days; ++step) {
                apply_lower(chol.lower, eps.data() + step * n, z.data());
                for (std::size_t i = 0; i < n; ++i) {
                    log_growth[i] += drift_step[i] + vol_step[i] * z[i];
                }
            }
            for (std::size_t i = 0; i < n; ++i) out.growth[p * n + i] = std::exp(log_growth[i]);
        }
    });
    return out;
}

std::vector<double> portfolio_values(const AssetGrowth& growth, std::span<const double> weights,
                                     double initial_value) {
    if (weights.size() != growth.n_assets) {
        throw ParameterError("weights dimension does not match simulated assets");
    }
    std::vector<double> values(growth.n_paths);
    for (std::size_t p = 0; p < growth.n_paths; ++p) {
        const auto g = growth.path(p);
        double acc = 0.0;
        for (std::size_t i = 0; i < growth.n_assets; ++i) acc += weights[i] * g[i];
        values[p] = initial_value * acc;
    }
    return values;
}

TerminalDistribution simulate_terminal_distribution(const SimulationConfig& config,
                                                    const CholeskyFactor& chol,
                                                    std::size_t threads) {
    const auto growth = simulate_asset_growth(config, chol, threads);
    return TerminalDistribution{
        portfolio_values(growth, config.weights, config.initial_portfolio_value), config};
}

std::vector<double> correlated_innovations(std::uint64_t seed, std::uint64_t path,
                                           std::uint64_t step, const CholeskyFactor& chol) {
    const std::size_t n = chol.size();
    std::vector<double> eps(n);
    std::vector<double> z(n);
    rng::PathNormals(seed, path).fill(step * n, eps.data(), n);
    apply_lower(chol.lower, eps.data(), z.data());
    return z;
}

} // namespace volvar::sim
