/**
 * @file portfolio.hpp
 * @brief Long-only allocation search over a simplex grid.
 *
 * The asset sample is simulated once; every candidate weight vector is scored
 * on that same sample (common random numbers), so the argmax is a
 * deterministic function of the seed. Candidates are enumerated in ascending
 * lexicographic order of their integer grid coordinates, and a later
 * candidate replaces the incumbent only when it is better by more than a
 * relative 1e-12. Flat objectives therefore select the first grid point,
 * which puts all weight on the last asset.
 */
#pragma once

#include "volvar/ingest.hpp"
#include "volvar/simulate.hpp"

#include <string>
#include <vector>

namespace volvar::portfolio {

enum class Objective {
    Sharpe,        ///< (mean(V_T)/V0 - 1) / (std(V_T)/V0)
    MeanTerminal,  ///< mean(V_T)
    VarAdjusted    ///< mean(V_T) - penalty * max(0, V0 - q_0.05(V_T))
};

Objective parse_objective(const std::string& label);
std::string to_string(Objective objective);

struct SearchOptions {
    double grid_step = 0.01;
    double var_penalty = 1.0;
    double var_level = 0.05;
    std::size_t threads = 0;
    std::size_t max_candidates = 2'000'000;
};

struct AllocationResult {
    std::vector<double> weights;
    double objective_value = 0.0;
    Objective objective_kind = Objective::Sharpe;
    std::size_t evaluations = 0;
};

/// All simplex grid points with spacing 1/divisions, in ascending
/// lexicographic order of the integer coordinates.
std::vector<std::vector<std::size_t>> simplex_grid(std::size_t n_assets, std::size_t divisions);

/// Searches the grid. Drifts come from `sim_template.drifts` when set,
/// otherwise from the daily means in `stats` times annualization_days.
/// `sim_template.weights` is ignored.
AllocationResult optimize_weights(const ingest::CrossStats& stats, const std::vector<double>& vols,
                                  const sim::SimulationConfig& sim_template, Objective objective,
                                  const SearchOptions& options = {});

/// Grid search over an already simulated asset sample.
AllocationResult search_allocation(const sim::AssetGrowth& growth, double initial_value,
                                   Objective objective, const SearchOptions& options = {});

/// Scores one weight vector on a simulated asset sample.
double evaluate_objective(const sim::AssetGrowth& growth, std::span<const double> weights,
                          double initial_value, Objective objective,
                          const SearchOptions& options = {});

} // namespace volvar::portfolio
