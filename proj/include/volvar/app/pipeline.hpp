/**
 * @file pipeline.hpp
 * @brief Orchestration for the `volvar` subcommands.
 *
 * Stages run sequentially: ingest -> model -> portfolio -> simulate -> risk.
 * A failure in any stage is rethrown as StageError carrying the stage name.
 * All randomness comes from the config seed; the simulation sub-seed is
 * derived from it and shared by every model row, so rows differ only in
 * their per-asset sigma inputs.
 */
#pragma once

#include "volvar/app/config.hpp"
#include "volvar/errors.hpp"
#include "volvar/ingest.hpp"
#include "volvar/mle.hpp"
#include "volvar/risk.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace volvar::app {

class StageError : public Error {
public:
    StageError(std::string stage, std::string kind, const std::string& message)
        : Error(std::move(kind), message), stage_(std::move(stage)) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Aligned inputs shared by every subcommand.
struct MarketData {
    std::vector<ingest::ReturnSeries> returns;  ///< aligned to common dates
    ingest::CrossStats stats;
};

MarketData load_market_data(const RunConfig& config);

struct ModelSigmas {
    std::vector<double> annual_vols;
    std::string convention;
    std::vector<mle::GarchFitResult> fits;  ///< garch11-mle only
};

/// Per-asset annualized sigma for one model label.
ModelSigmas model_sigmas(const std::string& label, const RunConfig& config, const MarketData& data);

struct ReportRow {
    std::string model;
    ModelSigmas sigmas;
    std::vector<double> drifts;
    portfolio::AllocationResult allocation;
    risk::RiskReport risk;
};

struct ComparisonReport {
    RunConfig config;
    MarketData data;
    std::uint64_t simulation_seed = 0;
    std::vector<ReportRow> rows;
};

ComparisonReport run_report(const RunConfig& config);

struct BacktestRow {
    std::string asset;
    std::string model;
    risk::BacktestResult result;
};

struct BacktestReport {
    RunConfig config;
    std::size_t window = 0;
    double level = 0.0;
    std::vector<BacktestRow> rows;
};

BacktestReport run_backtest(const RunConfig& config, std::size_t window, double level);

struct FitRow {
    std::string asset;
    mle::GarchFitResult fit;
};

struct FitReport {
    RunConfig config;
    std::vector<FitRow> rows;
};

/// Fits GARCH(1,1) to each configured asset (requires garch11-mle in `models`).
FitReport run_fit(const RunConfig& config);

struct SimulateReport {
    std::string model;
    std::vector<std::string> assets;
    std::vector<double> vols;
    std::vector<double> drifts;
    sim::TerminalDistribution distribution;
    risk::RiskReport risk;
};

/// Terminal distribution for one model with the configured weights (or the
/// optimized ones when `simulation.weights` is absent).
SimulateReport run_simulate(const RunConfig& config, const std::string& model);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const BacktestReport& report);
nlohmann::json to_json(const FitReport& report);

void print_table(std::ostream& out, const ComparisonReport& report);
void print_table(std::ostream& out, const BacktestReport& report);
void print_table(std::ostream& out, const FitReport& report);

/// Writes `text` to `path` via a temporary file and rename, creating parents.
void write_file_atomically(const std::filesystem::path& path, const std::string& text);

/// Canonical serialization used for report files (sorted keys, 2-space indent).
std::string dump(const nlohmann::json& doc);

} // namespace volvar::app
