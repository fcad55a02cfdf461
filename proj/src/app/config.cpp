#include "volvar/app/config.hpp"

#include "volvar/errors.hpp"
#include "volvar/risk.hpp"
#include "volvar/volmodels.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace volvar::app {

namespace {

void reject_unknown_keys(const YAML::Node& node, const std::string& where,
                         const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw ParseError(where + " must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) throw ParseError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
    if (!node[key]) return;
    try {
        out = node[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ParseError(where + "." + key + ": invalid value");
    }
}

} // namespace

RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!root.IsMap()) throw ParseError("config: top level must be a mapping");
    reject_unknown_keys(root, "config",
                        {"assets", "models", "model_params", "simulation", "risk", "portfolio",
                         "backtest", "output"});

    RunConfig config;
    if (const auto assets = root["assets"]) {
        if (!assets.IsSequence()) throw ParseError("config.assets must be a list");
        for (const auto& entry : assets) {
            reject_unknown_keys(entry, "config.assets[]", {"id", "file"});
            AssetEntry asset;
            read(entry, "id", asset.id, "assets[]");
            std::string file;
            read(entry, "file", file, "assets[]");
            if (asset.id.empty() || file.empty()) {
                throw ParseError("config.assets[] entries need 'id' and 'file'");
            }
            asset.file = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file)
                                                                   : base_dir / file;
            config.assets.push_back(std::move(asset));
        }
    }
    if (const auto models = root["models"]) {
        if (!models.IsSequence()) throw ParseError("config.models must be a list");
        for (const auto& m : models) config.models.push_back(m.as<std::string>());
    }
    if (const auto mp = root["model_params"]) {
        reject_unknown_keys(mp, "config.model_params", {"ewma-igarch", "igarch-mr", "asym-igarch"});
        if (const auto n = mp["ewma-igarch"]) {
            reject_unknown_keys(n, "model_params.ewma-igarch", {"lambda"});
            read(n, "lambda", config.params.ewma_lambda, "ewma-igarch");
        }
        if (const auto n = mp["igarch-mr"]) {
            reject_unknown_keys(n, "model_params.igarch-mr", {"lambda", "kappa"});
            read(n, "lambda", config.params.mr_lambda, "igarch-mr");
            read(n, "kappa", config.params.mr_kappa, "igarch-mr");
        }
        if (const auto n = mp["asym-igarch"]) {
            reject_unknown_keys(n, "model_params.asym-igarch", {"lambda", "gamma"});
            read(n, "lambda", config.params.asym_lambda, "asym-igarch");
            read(n, "gamma", config.params.asym_gamma, "asym-igarch");
        }
    }
    if (const auto s = root["simulation"]) {
        reject_unknown_keys(s, "config.simulation",
                            {"n_paths", "horizon_days", "initial_value", "seed",
                             "annualization_days", "threads", "weights"});
        auto& sim = config.simulation;
        read(s, "n_paths", sim.n_paths, "simulation");
        read(s, "horizon_days", sim.horizon_days, "simulation");
        read(s, "initial_value", sim.initial_value, "simulation");
        read(s, "seed", sim.seed, "simulation");
        read(s, "annualization_days", sim.annualization_days, "simulation");
        read(s, "threads", sim.threads, "simulation");
        read(s, "weights", sim.weights, "simulation");
    }
    if (const auto r = root["risk"]) {
        reject_unknown_keys(r, "config.risk", {"level", "threshold"});
        read(r, "level", config.risk.level, "risk");
        read(r, "threshold", config.risk.threshold, "risk");
    }
    if (const auto p = root["portfolio"]) {
        reject_unknown_keys(p, "config.portfolio", {"objective", "grid_step", "var_penalty"});
        read(p, "objective", config.portfolio.objective, "portfolio");
        read(p, "grid_step", config.portfolio.grid_step, "portfolio");
        read(p, "var_penalty", config.portfolio.var_penalty, "portfolio");
    }
    if (const auto b = root["backtest"]) {
        reject_unknown_keys(b, "config.backtest", {"window", "level"});
        read(b, "window", config.backtest.window, "backtest");
        read(b, "level", config.backtest.level, "backtest");
    }
    if (const auto o = root["output"]) {
        reject_unknown_keys(o, "config.output", {"dir"});
        std::string dir;
        read(o, "dir", dir, "output");
        if (!dir.empty()) {
            config.output_dir =
                std::filesystem::path(dir).is_absolute() ? std::filesystem::path(dir) : base_dir / dir;
        }
    } else {
        config.output_dir = base_dir / "out";
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto config = parse_run_config(buffer.str(), path.parent_path());
    config.source = path;
    return config;
}

void validate(const RunConfig& config) {
    if (config.models.empty()) throw ParameterError("no models selected");
    std::set<std::string> seen_models;
    for (const auto& m : config.models) {
        if (std::find(kModelLabels.begin(), kModelLabels.end(), m) == kModelLabels.end()) {
            throw ParameterError("unknown model '" + m + "'");
        }
        if (!seen_models.insert(m).second) throw ParameterError("model '" + m + "' listed twice");
    }

    if (config.assets.empty()) throw ParameterError("no assets configured");
    std::set<std::string> seen_assets;
    for (const auto& a : config.assets) {
        if (!seen_assets.insert(a.id).second) throw ParameterError("asset '" + a.id + "' listed twice");
        if (!std::filesystem::exists(a.file)) {
            throw ValidationError("asset '" + a.id + "': file " + a.file.string() + " does not exist");
        }
    }

    const auto& p = config.params;
    vol::validate(vol::EwmaIgarch{p.ewma_lambda});
    vol::validate(vol::IgarchMeanRevert{p.mr_lambda, p.mr_kappa, 0.0});
    if (!(p.mr_kappa > 0.0)) throw ParameterError("igarch-mr: kappa must be > 0");
    vol::validate(vol::AsymIgarch{p.asym_lambda, p.asym_gamma});

    const auto& s = config.simulation;
    if (s.n_paths < 1) throw ParameterError("simulation.n_paths must be >= 1");
    if (s.horizon_days < 1) throw ParameterError("simulation.horizon_days must be >= 1");
    if (!(s.initial_value > 0.0)) throw ParameterError("simulation.initial_value must be > 0");
    if (!(s.annualization_days > 0.0)) {
        throw ParameterError("simulation.annualization_days must be > 0");
    }
    if (!s.weights.empty() && s.weights.size() != config.assets.size()) {
        throw ParameterError("simulation.weights needs one entry per asset");
    }

    if (!(config.risk.level > 0.0 && config.risk.level < 1.0)) {
        throw ParameterError("risk.level must lie in (0, 1)");
    }
    portfolio::parse_objective(config.portfolio.objective);
    if (!(config.portfolio.grid_step > 0.0 && config.portfolio.grid_step <= 1.0)) {
        throw ParameterError("portfolio.grid_step must lie in (0, 1]");
    }
    if (!(config.portfolio.var_penalty >= 0.0)) {
        throw ParameterError("portfolio.var_penalty must be >= 0");
    }
    if (!(config.backtest.level > 0.0 && config.backtest.level < 1.0)) {
        throw ParameterError("backtest.level must lie in (0, 1)");
    }
    if (config.backtest.window < risk::kMinBacktestWindow) {
        throw ParameterError("backtest.window must be >= " + std::to_string(risk::kMinBacktestWindow));
    }
}

} // namespace volvar::app
