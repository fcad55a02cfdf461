#include "volvar/volmodels.hpp"

#include "volvar/errors.hpp"

#include <cmath>
#include <numeric>

namespace volvar::vol {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_decay(double lambda, const char* model) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw ParameterError(std::string(model) + ": lambda must lie in (0, 1), got " +
                             std::to_string(lambda));
    }
}

void require_seed(double seed_variance) {
    if (!(seed_variance >= 0.0) || !std::isfinite(seed_variance)) {
        throw ParameterError("seed variance must be finite and >= 0, got " +
                             std::to_string(seed_variance));
    }
}

} // namespace

void validate(const VolatilityModel& model) {
    std::visit(overloaded{
                   [](const EwmaIgarch& m) { require_decay(m.lambda, "ewma-igarch"); },
                   [](const Garch11& m) {
                       if (!(m.omega >= 0.0 && m.alpha >= 0.0 && m.beta >= 0.0)) {
                           throw ParameterError("garch11: omega, alpha, beta must be >= 0");
                       }
                   },
                   [](const IgarchMeanRevert& m) {
                       require_decay(m.lambda, "igarch-mr");
                       if (!(m.kappa >= 0.0)) {
                           throw ParameterError("igarch-mr: kappa must be >= 0");
                       }
                       if (!(m.kappa < m.lambda)) {
                           throw ParameterError("igarch-mr: kappa must be below lambda, got kappa=" +
                                                std::to_string(m.kappa) +
                                                " lambda=" + std::to_string(m.lambda));
                       }
                       if (!(m.sigma_bar_sq >= 0.0)) {
                           throw ParameterError("igarch-mr: long-run variance must be >= 0");
                       }
                   },
                   [](const AsymIgarch& m) {
                       require_decay(m.lambda, "asym-igarch");
                       if (!(m.gamma >= 0.0)) {
                           throw ParameterError("asym-igarch: gamma must be >= 0, got " +
                                                std::to_string(m.gamma));
                       }
                   },
               },
               model);
}

std::string model_name(const VolatilityModel& model) {
    return std::visit(overloaded{
                          [](const EwmaIgarch&) { return std::string("ewma-igarch"); },
                          [](const Garch11&) { return std::string("garch11"); },
                          [](const IgarchMeanRevert&) { return std::string("igarch-mr"); },
                          [](const AsymIgarch&) { return std::string("asym-igarch"); },
                      },
                      model);
}

SigmaConvention sigma_convention(const VolatilityModel& model) {
    if (std::holds_alternative<IgarchMeanRevert>(model) || std::holds_alternative<AsymIgarch>(model)) {
        return SigmaConvention::PathMean;
    }
    return SigmaConvention::FinalDay;
}

std::string to_string(SigmaConvention convention) {
    return convention == SigmaConvention::FinalDay ? "final-day" : "path-mean";
}

double next_variance(const VolatilityModel& model, double prev_variance, double prev_return) {
    const double shock = prev_return * prev_return;
    return std::visit(
        overloaded{
            [&](const EwmaIgarch& m) {
                return m.lambda * prev_variance + (1.0 - m.lambda) * shock;
            },
            [&](const Garch11& m) {
                return m.omega + m.alpha * shock + m.beta * prev_variance;
            },
            [&](const IgarchMeanRevert& m) {
                return m.lambda * prev_variance + (1.0 - m.lambda) * shock -
                       m.kappa * (prev_variance - m.sigma_bar_sq);
            },
            [&](const AsymIgarch& m) {
                const double amplified = prev_return < 0.0 ? shock + m.gamma * shock : shock;
                return m.lambda * prev_variance + (1.0 - m.lambda) * amplified;
            },
        },
        model);
}

VariancePath variance_path(const ingest::ReturnSeries& returns, const VolatilityModel& model,
                           double seed_variance) {
    validate(model);
    require_seed(seed_variance);

    VariancePath path{{}, {}, model, seed_variance};
    const auto& r = returns.returns;
    path.variances.resize(r.size() + 1);
    path.variances[0] = seed_variance;
    for (std::size_t t = 1; t <= r.size(); ++t) {
        // Rounding in the reversion form can dip a hair below zero when the
        // true value is 0; the exact recursion is nonnegative for valid params.
        path.variances[t] = std::max(0.0, next_variance(model, path.variances[t - 1], r[t - 1]));
    }
    // Element t is the forecast for the date of return t; the last one is
    // the day after the final return.
    if (returns.timestamps.size() == r.size() && !r.empty()) {
        path.timestamps = returns.timestamps;
        path.timestamps.push_back(
            std::chrono::sys_days{returns.timestamps.back()} + std::chrono::days{1});
    }
    return path;
}

VariancePath variance_path(const ingest::ReturnSeries& returns, const VolatilityModel& model) {
    return variance_path(returns, model, ingest::sample_variance(returns.returns));
}

VariancePath ewma_variance_path(const ingest::ReturnSeries& returns, double lambda,
                                double seed_variance) {
    return variance_path(returns, EwmaIgarch{lambda}, seed_variance);
}

VariancePath garch11_variance_path(const ingest::ReturnSeries& returns, const Garch11& params,
                                   double seed_variance) {
    return variance_path(returns, params, seed_variance);
}

VariancePath igarch_mr_variance_path(const ingest::ReturnSeries& returns, double lambda,
                                     double kappa, double sigma_bar_sq, double seed_variance) {
    return variance_path(returns, IgarchMeanRevert{lambda, kappa, sigma_bar_sq}, seed_variance);
}

VariancePath asym_igarch_variance_path(const ingest::ReturnSeries& returns, double lambda,
                                       double gamma, double seed_variance) {
    return variance_path(returns, AsymIgarch{lambda, gamma}, seed_variance);
}

double annualize_variance(double daily_variance, double days) {
    if (!(daily_variance >= 0.0)) {
        throw ParameterError("cannot annualize negative variance " + std::to_string(daily_variance));
    }
    if (!(days > 0.0)) throw ParameterError("annualization days must be positive");
    return std::sqrt(days * daily_variance);
}

double model_sigma_for_simulation(std::span<const double> variances, SigmaConvention convention,
                                  double days) {
    if (variances.empty()) throw ValidationError("empty variance path");
    if (convention == SigmaConvention::FinalDay) return annualize_variance(variances.back(), days);
    const double mean = std::accumulate(variances.begin(), variances.end(), 0.0) /
                        static_cast<double>(variances.size());
    return annualize_variance(mean, days);
}

double model_sigma_for_simulation(const VariancePath& path, double days) {
    return model_sigma_for_simulation(path.variances, sigma_convention(path.model), days);
}

} // namespace volvar::vol
