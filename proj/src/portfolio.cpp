#include "volvar/portfolio.hpp"

#include "volvar/errors.hpp"
#include "volvar/parallel.hpp"
#include "volvar/risk.hpp"

#include <cmath>
#include <limits>

namespace volvar::portfolio {

namespace {

constexpr double kTieTolerance = 1e-12;

/// Objective on per-unit portfolio growth (V_T / V0). Positive scaling by V0
/// happens only when reporting, so the argmax never depends on V0.
double unit_score(std::span<const double> unit_values, Objective objective,
                  const SearchOptions& options) {
    const auto stats = risk::summarize(unit_values);
    switch (objective) {
    case Objective::Sharpe:
        // Dispersion at rounding level counts as none.
        return stats.stddev > 1e-14 * std::abs(stats.mean) ? (stats.mean - 1.0) / stats.stddev
                                                            : 0.0;
    case Objective::MeanTerminal:
        return stats.mean;
    case Objective::VarAdjusted: {
        const double q = risk::var_quantile(unit_values, options.var_level);
        return stats.mean - options.var_penalty * std::max(0.0, 1.0 - q);
    }
    }
    throw ParameterError("unhandled objective");
}

double report_scale(Objective objective, double initial_value) {
    return objective == Objective::Sharpe ? 1.0 : initial_value;
}

void unit_values_into(const sim::AssetGrowth& growth, std::span<const double> weights,
                      std::vector<double>& out) {
    out.resize(growth.n_paths);
    for (std::size_t p = 0; p < growth.n_paths; ++p) {
        const auto g = growth.path(p);
        double acc = 0.0;
        for (std::size_t i = 0; i < growth.n_assets; ++i) acc += weights[i] * g[i];
        out[p] = acc;
    }
}

void compositions(std::size_t n, std::size_t remaining, std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
    if (current.size() + 1 == n) {
        current.push_back(remaining);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (std::size_t k = 0; k <= remaining; ++k) {
        current.push_back(k);
        compositions(n, remaining - k, current, out);
        current.pop_back();
    }
}

double binomial(std::size_t n, std::size_t k) {
    double result = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        result *= static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return result;
}

} // namespace

Objective parse_objective(const std::string& label) {
    if (label == "sharpe") return Objective::Sharpe;
    if (label == "mean_terminal") return Objective::MeanTerminal;
    if (label == "var_adjusted") return Objective::VarAdjusted;
    throw ParameterError("unknown objective '" + label +
                         "', expected sharpe, mean_terminal or var_adjusted");
}

std::string to_string(Objective objective) {
    switch (objective) {
    case Objective::Sharpe: return "sharpe";
    case Objective::MeanTerminal: return "mean_terminal";
    case Objective::VarAdjusted: return "var_adjusted";
    }
    return "unknown";
}

std::vector<std::vector<std::size_t>> simplex_grid(std::size_t n_assets, std::size_t divisions) {
    if (n_assets == 0) throw ParameterError("simplex grid needs at least one asset");
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> current;
    compositions(n_assets, divisions, current, out);
    return out;
}

double evaluate_objective(const sim::AssetGrowth& growth, std::span<const double> weights,
                          double initial_value, Objective objective, const SearchOptions& options) {
    if (weights.size() != growth.n_assets) {
        throw ParameterError("weights dimension does not match simulated assets");
    }
    std::vector<double> unit;
    unit_values_into(growth, weights, unit);
    return report_scale(objective, initial_value) * unit_score(unit, objective, options);
}

static std::size_t grid_divisions(double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 1.0)) {
        throw ParameterError("grid step must lie in (0, 1]; a coarser grid has a single point");
    }
    const double raw = 1.0 / grid_step;
    const auto divisions = static_cast<std::size_t>(std::llround(raw));
    if (std::abs(raw - static_cast<double>(divisions)) > 1e-9) {
        throw ParameterError("grid step must divide 1 evenly, got " + std::to_string(grid_step));
    }
    return divisions;
}

AllocationResult search_allocation(const sim::AssetGrowth& growth, double initial_value,
                                   Objective objective, const SearchOptions& options) {
    const std::size_t n = growth.n_assets;
    if (n == 0) throw ParameterError("allocation search needs at least one asset");
    const std::size_t divisions = grid_divisions(options.grid_step);
    const double candidates = binomial(divisions + n - 1, n - 1);
    if (candidates > static_cast<double>(options.max_candidates)) {
        throw ParameterError("grid has " + std::to_string(candidates) +
                             " candidates; use a coarser step or fewer assets");
    }

    const auto grid = simplex_grid(n, divisions);
    std::vector<double> scores(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> weights(n);
        std::vector<double> unit;
        for (std::size_t c = begin; c < end; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                weights[i] = static_cast<double>(grid[c][i]) / static_cast<double>(divisions);
            }
            unit_values_into(growth, weights, unit);
            scores[c] = unit_score(unit, objective, options);
        }
    });

    std::size_t best = 0;
    for (std::size_t c = 1; c < grid.size(); ++c) {
        const double incumbent = scores[best];
        if (scores[c] > incumbent + kTieTolerance * std::max(1.0, std::abs(incumbent))) best = c;
    }
    if (!std::isfinite(scores[best])) throw ValidationError("allocation objective is not finite");

    AllocationResult result;
    result.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.weights[i] = static_cast<double>(grid[best][i]) / static_cast<double>(divisions);
    }
    result.objective_value = report_scale(objective, initial_value) * scores[best];
    result.objective_kind = objective;
    result.evaluations = grid.size();
    return result;
}

AllocationResult optimize_weights(const ingest::CrossStats& stats, const std::vector<double>& vols,
                                  const sim::SimulationConfig& sim_template, Objective objective,
                                  const SearchOptions& options) {
    const std::size_t n = stats.asset_ids.size();
    if (n == 0) throw ParameterError("allocation search needs at least one asset");
    if (vols.size() != n) throw ParameterError("one volatility per asset is required");
    grid_divisions(options.grid_step);

    sim::SimulationConfig config = sim_template;
    config.vols = vols;
    if (config.drifts.empty()) {
        config.drifts.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            config.drifts[i] = stats.means[i] * config.annualization_days;
        }
    }
    config.weights.assign(n, 0.0);
    config.weights[0] = 1.0;

    const auto chol = sim::cholesky(stats.correlation, sim::Definiteness::Semidefinite);
    const auto growth = sim::simulate_asset_growth(config, chol, options.threads);
    return search_allocation(growth, config.initial_portfolio_value, objective, options);
}

} // namespace volvar::portfolio
