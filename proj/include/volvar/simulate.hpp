/**
 * @file simulate.hpp
 * @brief Correlated multi-asset GBM Monte Carlo.
 *
 * Each asset i follows, at daily steps dt = 1 / annualization_days,
 *
 *   ln S_i(t+dt) = ln S_i(t) + (mu_i - sigma_i^2 / 2) dt + sigma_i sqrt(dt) z_i,   z = L eps
 *
 * with L the Cholesky factor of the correlation matrix and eps i.i.d. N(0,1).
 * Volatility is a per-asset constant (the annualized model sigma). The
 * terminal portfolio value is V0 * sum_i w_i * S_i(T) / S_i(0).
 *
 * Every normal draw is addressed by (seed, path, step, asset) through a
 * counter-based generator, so results are bit-identical at any thread count.
 */
#pragma once

#include "volvar/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace volvar::sim {

struct CholeskyFactor {
    Matrix lower;

    [[nodiscard]] std::size_t size() const noexcept { return lower.rows(); }
};

enum class Definiteness {
    Strict,       ///< every pivot must be > 0
    Semidefinite  ///< pivots within 1e-12 of zero give a zero column (perfect correlation)
};

/// Throws DecompositionError naming the first leading minor that fails.
CholeskyFactor cholesky(const Matrix& correlation, Definiteness mode = Definiteness::Strict);

struct SimulationConfig {
    std::size_t n_paths = 100000;
    std::size_t horizon_days = 252;
    double initial_portfolio_value = 100000.0;
    std::vector<double> weights;
    std::vector<double> drifts;  ///< annualized
    std::vector<double> vols;    ///< annualized
    double annualization_days = 252.0;
    std::uint64_t seed = 0;
};

/// Throws ParameterError on any invariant breach; `n_assets` is the expected dimension.
void validate(const SimulationConfig& config, std::size_t n_assets);

/// Gross growth factors S_T / S_0, path-major: growth[path * n_assets + asset].
struct AssetGrowth {
    std::size_t n_paths = 0;
    std::size_t n_assets = 0;
    std::vector<double> growth;

    [[nodiscard]] std::span<const double> path(std::size_t p) const {
        return {growth.data() + p * n_assets, n_assets};
    }
};

struct TerminalDistribution {
    std::vector<double> terminal_values;
    SimulationConfig config;

    [[nodiscard]] std::size_t size() const noexcept { return terminal_values.size(); }
};

/// Per-asset growth factors for every path. Weights are not used, so one
/// sample can be re-weighted for many allocations (common random numbers).
AssetGrowth simulate_asset_growth(const SimulationConfig& config, const CholeskyFactor& chol,
                                  std::size_t threads = 0);

/// V0 * sum_i w_i * growth_i for each path.
std::vector<double> portfolio_values(const AssetGrowth& growth, std::span<const double> weights,
                                     double initial_value);

TerminalDistribution simulate_terminal_distribution(const SimulationConfig& config,
                                                    const CholeskyFactor& chol,
                                                    std::size_t threads = 0);

/// The correlated innovations z = L eps used by `path` at `step`.
std::vector<double> correlated_innovations(std::uint64_t seed, std::uint64_t path,
                                           std::uint64_t step, const CholeskyFactor& chol);

} // namespace volvar::sim
