#pragma once

#include "volvar/portfolio.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace volvar::app {

/// Model labels accepted in `models:`.
inline const std::vector<std::string> kModelLabels = {"gbm-static", "ewma-igarch", "igarch-mr",
                                                      "asym-igarch", "garch11-mle"};

struct AssetEntry {
    std::string id;
    std::filesystem::path file;  ///< resolved against the config file's directory
};

struct ModelParams {
    double ewma_lambda = 0.94;
    double mr_lambda = 0.85;
    double mr_kappa = 0.02;
    double asym_lambda = 0.97;
    double asym_gamma = 0.25;
};

struct SimulationBlock {
    std::size_t n_paths = 100000;
    std::size_t horizon_days = 252;
    double initial_value = 100000.0;
    std::uint64_t seed = 42;
    double annualization_days = 252.0;
    std::size_t threads = 0;
    std::vector<double> weights;  ///< optional fixed allocation for `simulate`
};

struct RiskBlock {
    double level = 0.05;
    double threshold = 0.0;  ///< <= 0 means "initial value"
};

struct PortfolioBlock {
    std::string objective = "sharpe";
    double grid_step = 0.01;
    double var_penalty = 1.0;
};

struct BacktestBlock {
    std::size_t window = 250;
    double level = 0.05;
};

struct RunConfig {
    std::filesystem::path source;  ///< config file path, empty when parsed from text
    std::vector<AssetEntry> assets;
    std::vector<std::string> models;
    ModelParams params;
    SimulationBlock simulation;
    RiskBlock risk;
    PortfolioBlock portfolio;
    BacktestBlock backtest;
    std::filesystem::path output_dir = "out";
};

/// Parses YAML text; relative asset paths resolve against `base_dir`.
/// Throws ParseError on malformed YAML or unknown keys, ParameterError on
/// values outside their domain.
RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

/// Checks every value before any computation (model preconditions included).
void validate(const RunConfig& config);

} // namespace volvar::app
