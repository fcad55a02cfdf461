#include "volvar/risk.hpp"

#include "volvar/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace volvar::risk {

double var_quantile(std::span<const double> values, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw ParameterError("quantile level must lie in (0, 1), got " + std::to_string(level));
    }
    if (values.empty()) throw ValidationError("quantile of an empty distribution");

    std::vector<double> sorted(values.begin(), values.end());
    const double h = static_cast<double>(sorted.size() - 1) * level;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    // Partial selection: only the two bracketing order statistics are needed.
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(lo), sorted.end());
    const double x_lo = sorted[lo];
    const double x_hi =
        hi == lo ? x_lo : *std::min_element(sorted.begin() + static_cast<std::ptrdiff_t>(hi), sorted.end());
    return x_lo + (h - static_cast<double>(lo)) * (x_hi - x_lo);
}

double var_quantile(const sim::TerminalDistribution& dist, double level) {
    return var_quantile(dist.terminal_values, level);
}

double loss_probability(std::span<const double> values, double threshold) {
    if (values.empty()) throw ValidationError("loss probability of an empty distribution");
    const auto below = std::count_if(values.begin(), values.end(),
                                     [threshold](double v) { return v < threshold; });
    return static_cast<double>(below) / static_cast<double>(values.size());
}

double loss_probability(const sim::TerminalDistribution& dist, double threshold) {
    return loss_probability(dist.terminal_values, threshold);
}

SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) throw ValidationError("summary of an empty distribution");
    SummaryStats s;
    const auto n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    return s;
}

RiskReport make_risk_report(const sim::TerminalDistribution& dist, std::string model_label,
                            double level, double threshold) {
    const double initial = dist.config.initial_portfolio_value;
    if (!(threshold > 0.0)) threshold = initial;

    RiskReport report;
    report.model_label = std::move(model_label);
    report.level = level;
    report.var_quantile_value = var_quantile(dist, level);
    report.var_loss_signed = initial - report.var_quantile_value;
    report.var_loss = std::max(0.0, report.var_loss_signed);
    report.loss_probability = loss_probability(dist, threshold);
    report.threshold = threshold;
    report.weights = dist.config.weights;
    report.summary = summarize(dist.terminal_values);
    report.n_paths = dist.config.n_paths;
    report.horizon_days = dist.config.horizon_days;
    report.seed = dist.config.seed;
    return report;
}

double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

namespace {

void check_backtest_inputs(const ingest::ReturnSeries& returns, std::size_t window, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw ParameterError("VaR level must lie in (0, 1), got " + std::to_string(level));
    }
    if (window < kMinBacktestWindow) {
        throw ParameterError("backtest window must be >= " + std::to_string(kMinBacktestWindow));
    }
    if (returns.size() <= window) {
        throw ValidationError(returns.asset_id + ": backtest window " + std::to_string(window) +
                              " needs more than " + std::to_string(window) + " returns, got " +
                              std::to_string(returns.size()));
    }
}

template <class Forecast>
BacktestResult rolling_backtest(const ingest::ReturnSeries& returns, std::size_t window,
                                double level, Forecast&& forecast_variance) {
    const auto& r = returns.returns;
    const double z = normal_quantile(level);
    BacktestResult result;
    result.window_length = window;
    result.expected_rate = level;
    for (std::size_t t = window; t < r.size(); ++t) {
        const std::span<const double> trailing(r.data() + (t - window), window);
        const double threshold = z * std::sqrt(forecast_variance(trailing));
        ++result.n_forecasts;
        if (r[t] < threshold) ++result.n_violations;
    }
    result.violation_rate =
        static_cast<double>(result.n_violations) / static_cast<double>(result.n_forecasts);
    return result;
}

} // namespace

BacktestResult backtest_var(const ingest::ReturnSeries& returns, const vol::VolatilityModel& model,
                            std::size_t window, double level) {
    check_backtest_inputs(returns, window, level);
    vol::validate(model);
    return rolling_backtest(returns, window, level, [&](std::span<const double> trailing) {
        const double seed = ingest::sample_variance(trailing);
        vol::VolatilityModel seeded = model;
        if (auto* mr = std::get_if<vol::IgarchMeanRevert>(&seeded)) mr->sigma_bar_sq = seed;
        double variance = seed;
        for (const double r : trailing) {
            variance = std::max(0.0, vol::next_variance(seeded, variance, r));
        }
        return variance;
    });
}

BacktestResult backtest_static_var(const ingest::ReturnSeries& returns, std::size_t window,
                                   double level) {
    check_backtest_inputs(returns, window, level);
    return rolling_backtest(returns, window, level, [](std::span<const double> trailing) {
        return ingest::sample_variance(trailing);
    });
}

} // namespace volvar::risk
