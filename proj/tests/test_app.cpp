#include "fixtures.hpp"

#include "volvar/app/config.hpp"
#include "volvar/app/pipeline.hpp"
#include "volvar/errors.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace volvar;
using namespace volvar::app;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Three GARCH assets with a shared factor, 600 daily closes each.
void write_market(const fixtures::TempDir& dir, std::size_t n = 600) {
    const auto f = fixtures::simulate_garch(5e-6, 0.1, 0.85, n, 1);
    const std::array<std::vector<double>, 3> idio = {fixtures::simulate_garch(1e-5, 0.08, 0.9, n, 2),
                                                     fixtures::simulate_garch(2e-5, 0.12, 0.85, n, 3),
                                                     fixtures::simulate_garch(8e-6, 0.05, 0.9, n, 4)};
    const std::array<double, 3> drift{0.001, 0.0005, -0.0002};
    const char* names[] = {"alpha", "beta", "gamma"};
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> r(n);
        for (std::size_t t = 0; t < n; ++t) r[t] = drift[k] + 0.8 * f[t] + idio[k][t];
        fixtures::write_price_csv(dir / (std::string(names[k]) + ".csv"), 10.0 * (k + 1), r);
    }
}

std::string base_yaml(const std::string& models = "[gbm-static, ewma-igarch, igarch-mr, asym-igarch]",
                      const std::string& extra = "") {
    return "assets:\n"
           "  - {id: alpha, file: alpha.csv}\n"
           "  - {id: beta, file: beta.csv}\n"
           "  - {id: gamma, file: gamma.csv}\n"
           "models: " + models + "\n"
           "simulation:\n"
           "  n_paths: 2000\n"
           "  horizon_days: 30\n"
           "  seed: 5\n"
           "portfolio:\n"
           "  grid_step: 0.1\n" + extra;
}

struct CommandResult {
    int status = 0;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    const std::string command = std::string(VOLVAR_CLI_PATH) + " " + args + " 2>&1";
    CommandResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) result.output += buf.data();
    const int raw = pclose(pipe);
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return result;
}

} // namespace

TEST_CASE("config defaults and path resolution") {
    const auto c = parse_run_config("assets:\n  - {id: a, file: data/a.csv}\nmodels: [ewma-igarch]\n", "/base");
    CHECK(c.assets[0].file == std::filesystem::path("/base/data/a.csv"));
    CHECK(c.output_dir == std::filesystem::path("/base/out"));
    CHECK(c.params.ewma_lambda == 0.94);
    CHECK(c.params.mr_lambda == 0.85);
    CHECK(c.params.mr_kappa == 0.02);
    CHECK(c.params.asym_lambda == 0.97);
    CHECK(c.params.asym_gamma == 0.25);
    CHECK(c.simulation.n_paths == 100000);
    CHECK(c.simulation.horizon_days == 252);
    CHECK(c.simulation.initial_value == 100000.0);
    CHECK(c.portfolio.objective == "sharpe");
    CHECK(c.risk.level == 0.05);
}

TEST_CASE("config round-trips into the report echo") {
    const std::string yaml = base_yaml("[ewma-igarch, igarch-mr]",
                                       "model_params:\n  igarch-mr: {lambda: 0.8, kappa: 0.05}\n"
                                       "risk: {level: 0.01, threshold: 95000}\n");
    const auto c = parse_run_config(yaml, "/x");
    const auto j = to_json(c);
    CHECK(j["model_params"]["igarch-mr"]["lambda"] == 0.8);
    CHECK(j["model_params"]["igarch-mr"]["kappa"] == 0.05);
    CHECK(j["risk"]["level"] == 0.01);
    CHECK(j["risk"]["threshold"] == 95000.0);
    CHECK(j["simulation"]["n_paths"] == 2000);
    CHECK(j["simulation"]["seed"] == 5);
    CHECK(j["portfolio"]["grid_step"] == 0.1);
    CHECK(j["models"] == nlohmann::json({"ewma-igarch", "igarch-mr"}));
}

TEST_CASE("config syntax errors") {
    CHECK_THROWS_AS(parse_run_config("assets: [\n", "."), ParseError);
    CHECK_THROWS_AS(parse_run_config("colour: red\n", "."), ParseError);
    CHECK_THROWS_AS(parse_run_config("simulation: {n_path: 3}\n", "."), ParseError);
    CHECK_THROWS_AS(parse_run_config("simulation: {n_paths: many}\n", "."), Error);
}

TEST_CASE("config validation") {
    fixtures::TempDir dir("cfg");
    write_market(dir, 50);
    auto load = [&](const std::string& yaml) { return parse_run_config(yaml, dir.path()); };

    CHECK_NOTHROW(validate(load(base_yaml())));
    try {
        validate(load(base_yaml("[]")));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("no models selected") != std::string::npos);
    }
    CHECK_THROWS(validate(load(base_yaml("[ewma]"))));
    CHECK_THROWS(validate(load(base_yaml("[ewma-igarch, ewma-igarch]"))));
    CHECK_THROWS(validate(load("assets:\n  - {id: a, file: nope.csv}\nmodels: [ewma-igarch]\n")));
    CHECK_THROWS(validate(load(base_yaml("[igarch-mr]", "model_params:\n  igarch-mr: {lambda: 0.5, kappa: 0.5}\n"))));
    CHECK_THROWS(validate(load(base_yaml("[igarch-mr]", "model_params:\n  igarch-mr: {kappa: 0.0}\n"))));
    CHECK_THROWS(validate(load(base_yaml("[asym-igarch]", "model_params:\n  asym-igarch: {gamma: -1}\n"))));
    CHECK_THROWS(validate(load(base_yaml("[ewma-igarch]", "model_params:\n  ewma-igarch: {lambda: 1.0}\n"))));
    CHECK_THROWS(validate(load(base_yaml("[ewma-igarch]", "risk: {level: 1.5}\n"))));
    CHECK_THROWS(validate(load(base_yaml("[ewma-igarch]", "backtest: {window: 10}\n"))));
    auto bad_sim = base_yaml();
    bad_sim.replace(bad_sim.find("n_paths: 2000"), 13, "n_paths: 0");
    CHECK_THROWS(validate(load(bad_sim)));
    CHECK_THROWS(validate(load(base_yaml("[ewma-igarch]", "portfolio_extra: 1\n"))));
}

TEST_CASE("report rows follow config order and carry the risk figures") {
    fixtures::TempDir dir("report");
    write_market(dir);
    const auto config = parse_run_config(base_yaml("[asym-igarch, gbm-static, ewma-igarch]"), dir.path());
    const auto report = run_report(config);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].model == "asym-igarch");
    CHECK(report.rows[1].model == "gbm-static");
    CHECK(report.rows[2].model == "ewma-igarch");
    for (const auto& row : report.rows) {
        CHECK(row.risk.n_paths == 2000);
        CHECK(row.allocation.weights.size() == 3);
        CHECK(row.risk.var_loss == doctest::Approx(std::max(0.0, 1e5 - row.risk.var_quantile_value)));
    }
    // gbm-static uses the annualized sample sigma.
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(report.rows[1].sigmas.annual_vols[i] ==
              doctest::Approx(std::sqrt(252.0 * report.data.stats.variances[i])).epsilon(1e-14));

    const auto j = to_json(report);
    CHECK(j["rows"].size() == 3);
    CHECK(j["rows"][0]["model"] == "asym-igarch");
    CHECK(j["rows"][0]["var_quantile"] == report.rows[0].risk.var_quantile_value);
    CHECK(j["seeds"]["master"] == 5);
    std::ostringstream table;
    print_table(table, report);
    CHECK(table.str().find("gbm-static") != std::string::npos);
}

TEST_CASE("mean reversion below the final variance lowers the VaR loss") {
    fixtures::TempDir dir("mr");
    // Calm first half, turbulent second half: the final EWMA variance sits above the sample variance.
    auto r = fixtures::iid_normal(300, 1e-4, 6);
    const auto loud = fixtures::iid_normal(100, 2.5e-3, 7);
    r.insert(r.end(), loud.begin(), loud.end());
    fixtures::write_price_csv(dir / "solo.csv", 50.0, r);
    const auto config = parse_run_config(
        "assets:\n  - {id: solo, file: solo.csv}\nmodels: [ewma-igarch, igarch-mr]\n"
        "model_params:\n  igarch-mr: {lambda: 0.94, kappa: 0.02}\n"
        "simulation: {n_paths: 20000, horizon_days: 60}\n",
        dir.path());
    const auto report = run_report(config);
    CHECK(report.rows[1].risk.var_loss < report.rows[0].risk.var_loss);
}

TEST_CASE("zero-volatility fixture through gbm-static") {
    fixtures::TempDir dir("flat");
    fixtures::write_price_csv(dir / "flat.csv", 100.0, std::vector<double>(40, 0.0));
    const auto config = parse_run_config(
        "assets:\n  - {id: flat, file: flat.csv}\nmodels: [gbm-static]\nsimulation: {n_paths: 1000}\n", dir.path());
    const auto report = run_report(config);
    CHECK(report.rows[0].risk.var_quantile_value == 100000.0);
    CHECK(report.rows[0].risk.loss_probability == 0.0);
}

TEST_CASE("report output is identical across runs and thread counts") {
    fixtures::TempDir dir("determinism");
    write_market(dir);
    auto config = parse_run_config(base_yaml("[ewma-igarch, igarch-mr]"), dir.path());
    config.simulation.threads = 1;
    const auto a = dump(to_json(run_report(config)));
    const auto b = dump(to_json(run_report(config)));
    config.simulation.threads = 6;
    const auto c = dump(to_json(run_report(config)));
    CHECK(a == b);
    CHECK(a == c);
    config.simulation.seed = 6;
    CHECK(dump(to_json(run_report(config))) != a);
}

TEST_CASE("backtest report") {
    fixtures::TempDir dir("bt");
    write_market(dir);
    const auto config = parse_run_config(base_yaml(), dir.path());
    const auto report = run_backtest(config, 250, 0.05);
    CHECK(report.rows.size() == 12);
    CHECK(report.rows[0].asset == "alpha");
    CHECK(report.rows[0].model == "gbm-static");
    for (const auto& row : report.rows) CHECK(row.result.n_forecasts == 600 - 250);

    try {
        run_backtest(config, 700, 0.05);
        FAIL("expected an error");
    } catch (const StageError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
        CHECK(e.stage() == "backtest");
    }
}

TEST_CASE("fit report") {
    fixtures::TempDir dir("fit");
    fixtures::write_price_csv(dir / "p.csv", 1.0, fixtures::simulate_garch(1e-5, 0.1, 0.85, 3000, 31));
    fixtures::write_price_csv(dir / "q.csv", 1.0, fixtures::simulate_garch(1e-5, 0.1, 0.85, 3000, 32));
    const auto config = parse_run_config(
        "assets:\n  - {id: q, file: q.csv}\n  - {id: p, file: p.csv}\nmodels: [garch11-mle]\n", dir.path());
    const auto report = run_fit(config);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].asset == "q");
    CHECK(report.rows[1].asset == "p");
    for (const auto& row : report.rows) CHECK(row.fit.persistence >= 0.90);
    CHECK(to_json(report)["rows"][0]["persistence"] == report.rows[0].fit.persistence);

    const auto no_fit = parse_run_config("assets:\n  - {id: q, file: q.csv}\nmodels: [ewma-igarch]\n", dir.path());
    CHECK_THROWS_AS(run_fit(no_fit), StageError);

    fixtures::write_price_csv(dir / "short.csv", 1.0, fixtures::iid_normal(50, 1e-4, 1));
    const auto short_cfg =
        parse_run_config("assets:\n  - {id: s, file: short.csv}\nmodels: [garch11-mle]\n", dir.path());
    try {
        run_fit(short_cfg);
        FAIL("expected an error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "fit");
        CHECK(e.kind() == "validation");
    }
}

TEST_CASE("atomic writes leave no temporary files") {
    fixtures::TempDir dir("atomic");
    write_file_atomically(dir / "x.json", "{}\n");
    write_file_atomically(dir / "x.json", "[]\n");
    CHECK(read_file(dir / "x.json") == "[]\n");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
    CHECK(files == 1);
}

TEST_CASE("cli report writes byte-identical files across parallelism") {
    fixtures::TempDir dir("cli");
    write_market(dir);
    fixtures::write_text(dir / "run.yaml", base_yaml("[gbm-static, igarch-mr]"));
    const auto cfg = (dir / "run.yaml").string();
    const auto first = run_cli("report --config " + cfg + " --threads 1 --out " + (dir / "o1").string());
    CHECK(first.status == 0);
    CHECK(first.output.find("igarch-mr") != std::string::npos);
    const auto second = run_cli("report --config " + cfg + " --threads 8 --out " + (dir / "o2").string());
    CHECK(second.status == 0);
    CHECK(read_file(dir / "o1" / "report.json") == read_file(dir / "o2" / "report.json"));
    CHECK(!read_file(dir / "o1" / "report.json").empty());
}

TEST_CASE("cli subcommands") {
    fixtures::TempDir dir("cli2");
    write_market(dir);
    fixtures::write_text(dir / "run.yaml", base_yaml("[ewma-igarch, garch11-mle]"));
    const auto cfg = (dir / "run.yaml").string();

    CHECK(run_cli("backtest --config " + cfg + " --window 100").status == 0);
    CHECK(std::filesystem::exists(dir / "out" / "backtest.json"));
    CHECK(run_cli("fit --config " + cfg).status == 0);
    CHECK(std::filesystem::exists(dir / "out" / "fit.json"));
    CHECK(run_cli("simulate --config " + cfg + " --model ewma-igarch").status == 0);
    CHECK(std::filesystem::exists(dir / "out" / "simulate_ewma-igarch.csv"));

    const auto fetched = run_cli("fetch --source csv:" + dir.path().string() + " --asset alpha");
    CHECK(fetched.status == 0);
    CHECK(fetched.output.rfind("date,close\n", 0) == 0);
}

TEST_CASE("cli failures print one machine-readable line") {
    fixtures::TempDir dir("cli3");
    write_market(dir);
    fixtures::write_text(dir / "empty.yaml", base_yaml("[]"));
    const auto none = run_cli("report --config " + (dir / "empty.yaml").string());
    CHECK(none.status == 1);
    CHECK(none.output.rfind("error stage=config kind=", 0) == 0);
    CHECK(none.output.find("no models selected") != std::string::npos);
    CHECK(std::count(none.output.begin(), none.output.end(), '\n') == 1);
    CHECK_FALSE(std::filesystem::exists(dir / "out" / "report.json"));

    fixtures::write_text(dir / "run.yaml", base_yaml("[ewma-igarch]"));
    const auto window = run_cli("backtest --config " + (dir / "run.yaml").string() + " --window 5000");
    CHECK(window.status == 1);
    CHECK(window.output.find("stage=backtest") != std::string::npos);
    CHECK(window.output.find("alpha") != std::string::npos);

    const auto missing = run_cli("report --config " + (dir / "missing.yaml").string());
    CHECK(missing.status == 1);
    CHECK(missing.output.rfind("error stage=config", 0) == 0);

    const auto exchange = run_cli("fetch --source exchange:kraken --asset btc");
    CHECK(exchange.status == 1);
    CHECK(exchange.output.rfind("error stage=fetch kind=unavailable", 0) == 0);

    CHECK(run_cli("").status == 1);
}
