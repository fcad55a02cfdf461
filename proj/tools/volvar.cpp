// volvar: conditional-volatility Monte Carlo VaR engine.
//
//   volvar report   --config run.yaml [--seed N] [--out DIR] [--threads N]
//   volvar backtest --config run.yaml [--window N] [--level 0.05]
//   volvar fit      --config run.yaml
//   volvar simulate --config run.yaml --model ewma-igarch [--out DIR]
//   volvar fetch    --source csv:DIR|exchange:NAME --asset ID [--out FILE]
//
// Failures print one line to stderr:
//   error stage=<stage> kind=<kind> message="<text>"
// and exit with status 1.

#include "volvar/app/pipeline.hpp"
#include "volvar/ingest.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

namespace {

using namespace volvar;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> threads;
};

app::RunConfig resolve(const CommonOptions& o) {
    app::RunConfig config;
    try {
        config = app::load_run_config(o.config_path);
    } catch (const Error& e) {
        throw app::StageError("config", e.kind(), e.what());
    }
    if (o.seed) config.simulation.seed = *o.seed;
    if (o.out_dir) config.output_dir = *o.out_dir;
    if (o.threads) config.simulation.threads = *o.threads;
    return config;
}

std::string escape(std::string text) {
    for (auto& c : text) {
        if (c == '\n' || c == '\r') c = ' ';
        if (c == '"') c = '\'';
    }
    return text;
}

int fail(const std::string& stage, const std::string& kind, const std::string& message) {
    std::cerr << "error stage=" << stage << " kind=" << kind << " message=\"" << escape(message)
              << "\"\n";
    return 1;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Run configuration (YAML)")->required();
    cmd->add_option("--out", o.out_dir, "Output directory (overrides output.dir)");
    cmd->add_option("--threads", o.threads, "Worker threads, 0 = all hardware threads");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Conditional-volatility Monte Carlo VaR engine"};
    cli.require_subcommand(1);

    CommonOptions common;
    auto* report_cmd = cli.add_subcommand("report", "Model comparison table");
    add_common(report_cmd, common);
    report_cmd->add_option("--seed", common.seed, "Master seed (overrides simulation.seed)");

    std::optional<std::size_t> window;
    std::optional<double> level;
    auto* backtest_cmd = cli.add_subcommand("backtest", "Rolling one-day VaR violation rates");
    add_common(backtest_cmd, common);
    backtest_cmd->add_option("--window", window, "Trailing window length (>= 30)");
    backtest_cmd->add_option("--level", level, "VaR level, e.g. 0.05");

    auto* fit_cmd = cli.add_subcommand("fit", "GARCH(1,1) maximum-likelihood fit per asset");
    add_common(fit_cmd, common);

    std::string model;
    auto* simulate_cmd = cli.add_subcommand("simulate", "Dump one model's terminal distribution");
    add_common(simulate_cmd, common);
    simulate_cmd->add_option("--seed", common.seed, "Master seed (overrides simulation.seed)");
    simulate_cmd->add_option("--model", model, "Model label")->required();

    std::string source;
    std::string asset;
    std::string fetch_out;
    auto* fetch_cmd = cli.add_subcommand("fetch", "Load one asset from a price source as CSV");
    fetch_cmd->add_option("--source", source, "csv:<dir> or exchange:<name>")->required();
    fetch_cmd->add_option("--asset", asset, "Asset id")->required();
    fetch_cmd->add_option("--out", fetch_out, "Output file (default: stdout)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return cli.exit(e);
        return fail("cli", "usage", e.what());
    }

    try {
        if (*report_cmd) {
            const auto config = resolve(common);
            const auto report = app::run_report(config);
            app::write_file_atomically(config.output_dir / "report.json",
                                       app::dump(app::to_json(report)));
            app::print_table(std::cout, report);
        } else if (*backtest_cmd) {
            const auto config = resolve(common);
            const auto report = app::run_backtest(config, window.value_or(config.backtest.window),
                                                  level.value_or(config.backtest.level));
            app::write_file_atomically(config.output_dir / "backtest.json",
                                       app::dump(app::to_json(report)));
            app::print_table(std::cout, report);
        } else if (*fit_cmd) {
            const auto config = resolve(common);
            const auto report = app::run_fit(config);
            app::write_file_atomically(config.output_dir / "fit.json",
                                       app::dump(app::to_json(report)));
            app::print_table(std::cout, report);
        } else if (*simulate_cmd) {
            const auto config = resolve(common);
            const auto report = app::run_simulate(config, model);
            std::ostringstream csv;
            csv << "path,terminal_value\n"
                << std::setprecision(std::numeric_limits<double>::max_digits10);
            const auto& values = report.distribution.terminal_values;
            for (std::size_t i = 0; i < values.size(); ++i) csv << i << ',' << values[i] << '\n';
            app::write_file_atomically(config.output_dir / ("simulate_" + model + ".csv"), csv.str());
            std::cout << std::fixed << std::setprecision(2) << "model " << model << ": "
                      << values.size() << " paths, mean " << report.risk.summary.mean
                      << ", VaR quantile " << report.risk.var_quantile_value
                      << ", loss probability " << report.risk.loss_probability << '\n';
        } else if (*fetch_cmd) {
            auto src = ingest::make_price_source(source);
            const auto prices = src->fetch(asset);
            if (fetch_out.empty()) {
                ingest::write_prices(std::cout, prices);
            } else {
                std::ostringstream text;
                ingest::write_prices(text, prices);
                app::write_file_atomically(fetch_out, text.str());
            }
        }
    } catch (const app::StageError& e) {
        return fail(e.stage(), e.kind(), e.what());
    } catch (const Error& e) {
        return fail(*fetch_cmd ? "fetch" : "cli", e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("cli", "internal", e.what());
    }
    return 0;
}
