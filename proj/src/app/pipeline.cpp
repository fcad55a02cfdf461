#include "volvar/app/pipeline.hpp"

#include "volvar/portfolio.hpp"
#include "volvar/rng.hpp"
#include "volvar/simulate.hpp"
#include "volvar/volmodels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace volvar::app {

namespace {

template <class F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.kind(), e.what());
    } catch (const std::exception& e) {
        throw StageError(stage, "internal", e.what());
    }
}

std::vector<ingest::ReturnSeries> load_returns(const RunConfig& config) {
    std::vector<ingest::ReturnSeries> out;
    for (const auto& asset : config.assets) {
        out.push_back(ingest::log_returns(ingest::load_prices(asset.file, asset.id)));
    }
    return out;
}

std::vector<double> annual_drifts(const RunConfig& config, const MarketData& data) {
    std::vector<double> drifts;
    for (const double m : data.stats.means) {
        drifts.push_back(m * config.simulation.annualization_days);
    }
    return drifts;
}

sim::SimulationConfig simulation_template(const RunConfig& config, std::vector<double> drifts,
                                          std::vector<double> vols, std::uint64_t seed) {
    sim::SimulationConfig s;
    s.n_paths = config.simulation.n_paths;
    s.horizon_days = config.simulation.horizon_days;
    s.initial_portfolio_value = config.simulation.initial_value;
    s.annualization_days = config.simulation.annualization_days;
    s.drifts = std::move(drifts);
    s.vols = std::move(vols);
    s.seed = seed;
    s.weights.assign(s.vols.size(), 0.0);
    if (!s.weights.empty()) s.weights[0] = 1.0;
    return s;
}

portfolio::SearchOptions search_options(const RunConfig& config) {
    portfolio::SearchOptions o;
    o.grid_step = config.portfolio.grid_step;
    o.var_penalty = config.portfolio.var_penalty;
    o.var_level = config.risk.level;
    o.threads = config.simulation.threads;
    return o;
}

std::string money(double value) {
    std::ostringstream digits;
    digits << std::fixed << std::setprecision(0) << std::abs(value);
    std::string s = digits.str();
    for (auto i = static_cast<std::ptrdiff_t>(s.size()) - 3; i > 0; i -= 3) {
        s.insert(static_cast<std::size_t>(i), ",");
    }
    return (value < 0 ? "-$" : "$") + s;
}

std::string percent(double fraction) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << 100.0 * fraction << '%';
    return out.str();
}

std::string allocation_text(const std::vector<std::string>& assets, const std::vector<double>& w) {
    std::ostringstream out;
    bool first = true;
    for (std::size_t i = 0; i < assets.size(); ++i) {
        if (w[i] <= 0.0) continue;
        if (!first) out << ' ';
        out << assets[i] << ' ' << std::fixed << std::setprecision(1) << 100.0 * w[i] << '%';
        first = false;
    }
    return out.str();
}

nlohmann::json weights_json(const std::vector<std::string>& assets, const std::vector<double>& w) {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t i = 0; i < assets.size(); ++i) out[assets[i]] = w[i];
    return out;
}

nlohmann::json fit_json(const mle::GarchFitResult& fit) {
    return {{"omega", fit.params.omega},
            {"alpha", fit.params.alpha},
            {"beta", fit.params.beta},
            {"persistence", fit.persistence},
            {"log_likelihood", fit.log_likelihood},
            {"converged", fit.converged},
            {"iterations", fit.iterations},
            {"seed_variance", fit.seed_variance},
            {"initial_guess",
             {{"omega", fit.initial_guess.omega},
              {"alpha", fit.initial_guess.alpha},
              {"beta", fit.initial_guess.beta}}}};
}

} // namespace

MarketData load_market_data(const RunConfig& config) {
    return in_stage("ingest", [&] {
        MarketData data;
        data.returns = ingest::align(load_returns(config));
        data.stats = ingest::align_and_stats(data.returns);
        return data;
    });
}

ModelSigmas model_sigmas(const std::string& label, const RunConfig& config, const MarketData& data) {
    return in_stage("model", [&] {
        const double days = config.simulation.annualization_days;
        const auto& p = config.params;
        ModelSigmas out;
        for (std::size_t i = 0; i < data.returns.size(); ++i) {
            const auto& r = data.returns[i];
            const double sample_var = data.stats.variances[i];
            if (label == "gbm-static") {
                out.convention = "sample-variance";
                out.annual_vols.push_back(vol::annualize_variance(sample_var, days));
                continue;
            }
            vol::VolatilityModel model;
            if (label == "ewma-igarch") {
                model = vol::EwmaIgarch{p.ewma_lambda};
            } else if (label == "igarch-mr") {
                model = vol::IgarchMeanRevert{p.mr_lambda, p.mr_kappa, sample_var};
            } else if (label == "asym-igarch") {
                model = vol::AsymIgarch{p.asym_lambda, p.asym_gamma};
            } else if (label == "garch11-mle") {
                out.fits.push_back(mle::fit_garch_mle(r));
                model = out.fits.back().params;
            } else {
                throw ParameterError("unknown model '" + label + "'");
            }
            const auto path = vol::variance_path(r, model, sample_var);
            out.convention = vol::to_string(vol::sigma_convention(model));
            out.annual_vols.push_back(vol::model_sigma_for_simulation(path, days));
        }
        return out;
    });
}

ComparisonReport run_report(const RunConfig& config) {
    in_stage("config", [&] { validate(config); });

    ComparisonReport report;
    report.config = config;
    report.data = load_market_data(config);
    report.simulation_seed = rng::derive_seed(config.simulation.seed, "simulate");
    const auto objective = in_stage(
        "config", [&] { return portfolio::parse_objective(config.portfolio.objective); });
    const auto drifts = annual_drifts(config, report.data);

    for (const auto& label : config.models) {
        ReportRow row;
        row.model = label;
        row.sigmas = model_sigmas(label, config, report.data);
        row.drifts = drifts;

        auto sim_config =
            simulation_template(config, drifts, row.sigmas.annual_vols, report.simulation_seed);
        const auto growth = in_stage("simulate", [&] {
            const auto chol =
                sim::cholesky(report.data.stats.correlation, sim::Definiteness::Semidefinite);
            return sim::simulate_asset_growth(sim_config, chol, config.simulation.threads);
        });
        row.allocation = in_stage("portfolio", [&] {
            return portfolio::search_allocation(growth, sim_config.initial_portfolio_value,
                                                objective, search_options(config));
        });
        row.risk = in_stage("risk", [&] {
            sim_config.weights = row.allocation.weights;
            sim::TerminalDistribution dist{
                sim::portfolio_values(growth, sim_config.weights, sim_config.initial_portfolio_value),
                sim_config};
            return risk::make_risk_report(dist, label, config.risk.level, config.risk.threshold);
        });
        report.rows.push_back(std::move(row));
    }
    return report;
}

BacktestReport run_backtest(const RunConfig& config, std::size_t window, double level) {
    in_stage("config", [&] { validate(config); });
    const auto series = in_stage("ingest", [&] { return load_returns(config); });

    BacktestReport report;
    report.config = config;
    report.window = window;
    report.level = level;
    in_stage("backtest", [&] {
        const auto& p = config.params;
        for (const auto& r : series) {
            if (r.size() <= window) {
                throw ValidationError("asset '" + r.asset_id + "': window " +
                                      std::to_string(window) + " is not smaller than its " +
                                      std::to_string(r.size()) + " returns");
            }
            for (const auto& label : config.models) {
                BacktestRow row{r.asset_id, label, {}};
                if (label == "gbm-static") {
                    row.result = risk::backtest_static_var(r, window, level);
                } else if (label == "ewma-igarch") {
                    row.result = risk::backtest_var(r, vol::EwmaIgarch{p.ewma_lambda}, window, level);
                } else if (label == "igarch-mr") {
                    row.result = risk::backtest_var(
                        r, vol::IgarchMeanRevert{p.mr_lambda, p.mr_kappa, 0.0}, window, level);
                } else if (label == "asym-igarch") {
                    row.result = risk::backtest_var(r, vol::AsymIgarch{p.asym_lambda, p.asym_gamma},
                                                    window, level);
                } else if (label == "garch11-mle") {
                    // Fitted once on the first window, then rolled with fixed parameters.
                    auto head = r;
                    head.returns.resize(window);
                    head.timestamps.resize(window);
                    row.result = risk::backtest_var(r, mle::fit_garch_mle(head).params, window, level);
                }
                report.rows.push_back(std::move(row));
            }
        }
    });
    return report;
}

FitReport run_fit(const RunConfig& config) {
    in_stage("config", [&] {
        validate(config);
        if (std::find(config.models.begin(), config.models.end(), "garch11-mle") ==
            config.models.end()) {
            throw ParameterError("fit requires garch11-mle among the selected models");
        }
    });
    const auto series = in_stage("ingest", [&] { return load_returns(config); });
    FitReport report;
    report.config = config;
    in_stage("fit", [&] {
        for (const auto& r : series) report.rows.push_back({r.asset_id, mle::fit_garch_mle(r)});
    });
    return report;
}

SimulateReport run_simulate(const RunConfig& config, const std::string& model) {
    in_stage("config", [&] {
        validate(config);
        if (std::find(kModelLabels.begin(), kModelLabels.end(), model) == kModelLabels.end()) {
            throw ParameterError("unknown model '" + model + "'");
        }
    });
    const auto data = load_market_data(config);
    const auto sigmas = model_sigmas(model, config, data);

    SimulateReport report;
    report.model = model;
    report.assets = data.stats.asset_ids;
    report.vols = sigmas.annual_vols;
    report.drifts = annual_drifts(config, data);

    auto sim_config =
        simulation_template(config, report.drifts, report.vols,
                            rng::derive_seed(config.simulation.seed, "simulate"));
    const auto growth = in_stage("simulate", [&] {
        const auto chol = sim::cholesky(data.stats.correlation, sim::Definiteness::Semidefinite);
        return sim::simulate_asset_growth(sim_config, chol, config.simulation.threads);
    });
    if (config.simulation.weights.empty()) {
        sim_config.weights = in_stage("portfolio", [&] {
            return portfolio::search_allocation(growth, sim_config.initial_portfolio_value,
                                                portfolio::parse_objective(config.portfolio.objective),
                                                search_options(config))
                .weights;
        });
    } else {
        sim_config.weights = config.simulation.weights;
    }
    report.risk = in_stage("risk", [&] {
        sim::validate(sim_config, growth.n_assets);
        report.distribution = sim::TerminalDistribution{
            sim::portfolio_values(growth, sim_config.weights, sim_config.initial_portfolio_value),
            sim_config};
        return risk::make_risk_report(report.distribution, model, config.risk.level,
                                      config.risk.threshold);
    });
    return report;
}

nlohmann::json to_json(const RunConfig& config) {
    nlohmann::json assets = nlohmann::json::array();
    for (const auto& a : config.assets) assets.push_back({{"id", a.id}, {"file", a.file.string()}});
    const auto& p = config.params;
    const auto& s = config.simulation;
    nlohmann::json sim = {{"n_paths", s.n_paths},
                          {"horizon_days", s.horizon_days},
                          {"initial_value", s.initial_value},
                          {"seed", s.seed},
                          {"annualization_days", s.annualization_days}};
    if (!s.weights.empty()) sim["weights"] = s.weights;
    return {{"assets", assets},
            {"models", config.models},
            {"model_params",
             {{"ewma-igarch", {{"lambda", p.ewma_lambda}}},
              {"igarch-mr", {{"lambda", p.mr_lambda}, {"kappa", p.mr_kappa}}},
              {"asym-igarch", {{"lambda", p.asym_lambda}, {"gamma", p.asym_gamma}}}}},
            {"simulation", sim},
            {"risk", {{"level", config.risk.level}, {"threshold", config.risk.threshold}}},
            {"portfolio",
             {{"objective", config.portfolio.objective},
              {"grid_step", config.portfolio.grid_step},
              {"var_penalty", config.portfolio.var_penalty}}},
            {"backtest", {{"window", config.backtest.window}, {"level", config.backtest.level}}}};
}

nlohmann::json to_json(const ComparisonReport& report) {
    const auto& stats = report.data.stats;
    const auto& assets = stats.asset_ids;
    nlohmann::json correlation = nlohmann::json::array();
    for (std::size_t i = 0; i < stats.correlation.rows(); ++i) {
        const auto row = stats.correlation.row(i);
        correlation.push_back(std::vector<double>(row.begin(), row.end()));
    }

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json j = {
            {"model", row.model},
            {"sigma_convention", row.sigmas.convention},
            {"annual_vols", weights_json(assets, row.sigmas.annual_vols)},
            {"annual_drifts", weights_json(assets, row.drifts)},
            {"weights", weights_json(assets, row.allocation.weights)},
            {"allocation_display", allocation_text(assets, row.allocation.weights)},
            {"objective", portfolio::to_string(row.allocation.objective_kind)},
            {"objective_value", row.allocation.objective_value},
            {"grid_evaluations", row.allocation.evaluations},
            {"var_level", row.risk.level},
            {"var_quantile", row.risk.var_quantile_value},
            {"var_quantile_display", money(row.risk.var_quantile_value)},
            {"var_loss", row.risk.var_loss},
            {"var_loss_signed", row.risk.var_loss_signed},
            {"var_loss_display", money(row.risk.var_loss)},
            {"loss_probability", row.risk.loss_probability},
            {"loss_probability_display", percent(row.risk.loss_probability)},
            {"threshold", row.risk.threshold},
            {"terminal_mean", row.risk.summary.mean},
            {"terminal_stddev", row.risk.summary.stddev},
            {"n_paths", row.risk.n_paths},
            {"horizon_days", row.risk.horizon_days},
            {"seed", row.risk.seed},
        };
        if (!row.sigmas.fits.empty()) {
            nlohmann::json fits = nlohmann::json::object();
            for (std::size_t i = 0; i < assets.size(); ++i) fits[assets[i]] = fit_json(row.sigmas.fits[i]);
            j["garch_fit"] = fits;
        }
        rows.push_back(std::move(j));
    }

    return {{"report", "comparison"},
            {"config", to_json(report.config)},
            {"data",
             {{"assets", assets},
              {"window_start", ingest::format_date(stats.common_dates.front())},
              {"window_end", ingest::format_date(stats.common_dates.back())},
              {"n_returns", stats.common_dates.size()},
              {"daily_means", weights_json(assets, stats.means)},
              {"daily_variances", weights_json(assets, stats.variances)},
              {"correlation", correlation}}},
            {"seeds",
             {{"master", report.config.simulation.seed}, {"simulate", report.simulation_seed}}},
            {"conventions",
             {{"seed_variance", "sample variance of the aligned window"},
              {"sigma_ewma_igarch", "final-day variance, annualized"},
              {"sigma_garch11_mle", "final-day variance, annualized"},
              {"sigma_igarch_mr", "mean of variance path, annualized"},
              {"sigma_asym_igarch", "mean of variance path, annualized"},
              {"sigma_gbm_static", "sample variance, annualized"},
              {"drift", "daily mean log-return times annualization_days"},
              {"annualization_days", report.config.simulation.annualization_days},
              {"var_quantile", "linear interpolation between order statistics"},
              {"loss_probability", "fraction strictly below threshold"}}},
            {"rows", rows}};
}

nlohmann::json to_json(const BacktestReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"asset", row.asset},
                        {"model", row.model},
                        {"window_length", row.result.window_length},
                        {"n_forecasts", row.result.n_forecasts},
                        {"n_violations", row.result.n_violations},
                        {"violation_rate", row.result.violation_rate},
                        {"expected_rate", row.result.expected_rate}});
    }
    return {{"report", "backtest"},
            {"config", to_json(report.config)},
            {"window", report.window},
            {"level", report.level},
            {"rows", rows}};
}

nlohmann::json to_json(const FitReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        auto j = fit_json(row.fit);
        j["asset"] = row.asset;
        rows.push_back(std::move(j));
    }
    return {{"report", "fit"}, {"config", to_json(report.config)}, {"rows", rows}};
}

void print_table(std::ostream& out, const ComparisonReport& report) {
    const auto& assets = report.data.stats.asset_ids;
    const double threshold = report.rows.empty() ? report.config.simulation.initial_value
                                                 : report.rows.front().risk.threshold;
    std::ostringstream prob_header;
    prob_header << "Loss Prob (< " << money(threshold) << ")";
    out << std::left << std::setw(14) << "Model" << std::right << std::setw(16) << "VaR quantile"
        << std::setw(14) << "VaR loss" << std::setw(26) << prob_header.str() << "  "
        << "Allocation\n";
    for (const auto& row : report.rows) {
        out << std::left << std::setw(14) << row.model << std::right << std::setw(16)
            << money(row.risk.var_quantile_value) << std::setw(14) << money(row.risk.var_loss)
            << std::setw(26) << percent(row.risk.loss_probability) << "  "
            << allocation_text(assets, row.allocation.weights) << '\n';
    }
}

void print_table(std::ostream& out, const BacktestReport& report) {
    out << std::left << std::setw(10) << "Asset" << std::setw(14) << "Model" << std::right
        << std::setw(11) << "Forecasts" << std::setw(12) << "Violations" << std::setw(10)
        << "Rate" << std::setw(10) << "Expected" << '\n';
    for (const auto& row : report.rows) {
        out << std::left << std::setw(10) << row.asset << std::setw(14) << row.model << std::right
            << std::setw(11) << row.result.n_forecasts << std::setw(12) << row.result.n_violations
            << std::setw(10) << percent(row.result.violation_rate) << std::setw(10)
            << percent(row.result.expected_rate) << '\n';
    }
}

void print_table(std::ostream& out, const FitReport& report) {
    out << std::left << std::setw(10) << "Asset" << std::right << std::setw(14) << "omega"
        << std::setw(10) << "alpha" << std::setw(10) << "beta" << std::setw(13) << "alpha+beta"
        << std::setw(16) << "log-lik" << std::setw(11) << "converged" << '\n';
    for (const auto& row : report.rows) {
        const auto& f = row.fit;
        out << std::left << std::setw(10) << row.asset << std::right << std::scientific
            << std::setprecision(4) << std::setw(14) << f.params.omega << std::fixed
            << std::setprecision(4) << std::setw(10) << f.params.alpha << std::setw(10)
            << f.params.beta << std::setw(13) << f.persistence << std::setprecision(2)
            << std::setw(16) << f.log_likelihood << std::setw(11) << (f.converged ? "yes" : "no")
            << '\n';
    }
}

void write_file_atomically(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out << text;
        if (!out) throw ValidationError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

} // namespace volvar::app
