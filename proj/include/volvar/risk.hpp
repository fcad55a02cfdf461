#pragma once

#include "volvar/ingest.hpp"
#include "volvar/simulate.hpp"
#include "volvar/volmodels.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace volvar::risk {

/// Empirical quantile with linear interpolation between order statistics
/// (position h = (n - 1) * level, 0-based).
double var_quantile(std::span<const double> values, double level);
double var_quantile(const sim::TerminalDistribution& dist, double level);

/// Fraction of values strictly below `threshold`.
double loss_probability(std::span<const double> values, double threshold);
double loss_probability(const sim::TerminalDistribution& dist, double threshold);

struct SummaryStats {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

SummaryStats summarize(std::span<const double> values);

struct RiskReport {
    std::string model_label;
    double level = 0.05;
    double var_quantile_value = 0.0;  ///< terminal-value quantile at `level`
    double var_loss = 0.0;            ///< max(0, initial - quantile)
    double var_loss_signed = 0.0;     ///< initial - quantile, unfloored
    double loss_probability = 0.0;
    double threshold = 0.0;
    std::vector<double> weights;
    SummaryStats summary;
    std::size_t n_paths = 0;
    std::size_t horizon_days = 0;
    std::uint64_t seed = 0;
};

/// Threshold defaults to the initial portfolio value when not positive.
RiskReport make_risk_report(const sim::TerminalDistribution& dist, std::string model_label,
                            double level = 0.05, double threshold = 0.0);

struct BacktestResult {
    std::size_t window_length = 0;
    std::size_t n_forecasts = 0;
    std::size_t n_violations = 0;
    double violation_rate = 0.0;
    double expected_rate = 0.0;
};

inline constexpr std::size_t kMinBacktestWindow = 30;

/// Rolling one-day parametric VaR backtest. For each day t >= window, the
/// model is seeded with the sample variance of returns [t - window, t) and
/// run over that window; the forecast for day t gives the threshold
/// Phi^-1(level) * sigma_t, and a violation is a realized return strictly
/// below it. For the mean-reversion model the long-run variance is also the
/// trailing-window sample variance.
BacktestResult backtest_var(const ingest::ReturnSeries& returns, const vol::VolatilityModel& model,
                            std::size_t window, double level = 0.05);

/// Same rolling scheme with a constant-volatility forecast: sigma_t^2 is the
/// sample variance of the trailing window (the static GBM baseline).
BacktestResult backtest_static_var(const ingest::ReturnSeries& returns, std::size_t window,
                                   double level = 0.05);

/// Standard normal quantile.
double normal_quantile(double p);

} // namespace volvar::risk
