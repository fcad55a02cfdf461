/**
 * @file volmodels.hpp
 * @brief Conditional-variance recursions over a daily log-return series.
 *
 * Every model produces a path where element 0 is the seed variance and
 * element t is the one-step-ahead forecast built from element t-1 and the
 * return observed on day t-1:
 *
 *   EWMA / IGARCH      s2[t] = lam*s2[t-1] + (1-lam)*r[t-1]^2
 *   GARCH(1,1)         s2[t] = omega + alpha*r[t-1]^2 + beta*s2[t-1]
 *   IGARCH + reversion s2[t] = lam*s2[t-1] + (1-lam)*r[t-1]^2 - kappa*(s2[t-1] - sbar2)
 *   asymmetric IGARCH  s2[t] = lam*s2[t-1] + (1-lam)*(1 + gamma*[r[t-1] < 0])*r[t-1]^2
 *
 * EWMA is GARCH(1,1) with omega = 0, alpha = 1-lam, beta = lam, i.e. alpha+beta = 1.
 * The reversion form rearranges to (lam-kappa)*s2[t-1] + (1-lam)*r^2 + kappa*sbar2,
 * which stays nonnegative exactly when kappa <= lam; kappa < lam is enforced.
 */
#pragma once

#include "volvar/ingest.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace volvar::vol {

inline constexpr double kTradingDays = 252.0;

struct EwmaIgarch {
    double lambda = 0.94;
};

struct Garch11 {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    [[nodiscard]] double persistence() const noexcept { return alpha + beta; }
};

struct IgarchMeanRevert {
    double lambda = 0.85;
    double kappa = 0.02;
    double sigma_bar_sq = 0.0;
};

struct AsymIgarch {
    double lambda = 0.97;
    double gamma = 0.25;
};

using VolatilityModel = std::variant<EwmaIgarch, Garch11, IgarchMeanRevert, AsymIgarch>;

/// Which summary of the variance path feeds the simulation.
enum class SigmaConvention { FinalDay, PathMean };

struct VariancePath {
    std::vector<ingest::Date> timestamps;  ///< forecast dates; one past the last return at the end
    std::vector<double> variances;
    VolatilityModel model;
    double seed_variance = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return variances.size(); }
};

/// Throws ParameterError if the model parameters are outside their domain.
void validate(const VolatilityModel& model);

std::string model_name(const VolatilityModel& model);
SigmaConvention sigma_convention(const VolatilityModel& model);
std::string to_string(SigmaConvention convention);

/// One step of the model recursion: the forecast following (prev_variance, prev_return).
/// Parameters are not validated here.
double next_variance(const VolatilityModel& model, double prev_variance, double prev_return);

/// Runs the recursion over `returns`; the model is validated first.
VariancePath variance_path(const ingest::ReturnSeries& returns, const VolatilityModel& model,
                           double seed_variance);

/// Same, using the unbiased sample variance of `returns` as the seed.
VariancePath variance_path(const ingest::ReturnSeries& returns, const VolatilityModel& model);

VariancePath ewma_variance_path(const ingest::ReturnSeries& returns, double lambda,
                                double seed_variance);
VariancePath garch11_variance_path(const ingest::ReturnSeries& returns, const Garch11& params,
                                   double seed_variance);
VariancePath igarch_mr_variance_path(const ingest::ReturnSeries& returns, double lambda,
                                     double kappa, double sigma_bar_sq, double seed_variance);
VariancePath asym_igarch_variance_path(const ingest::ReturnSeries& returns, double lambda,
                                       double gamma, double seed_variance);

/// sqrt(days * daily_variance).
double annualize_variance(double daily_variance, double days = kTradingDays);

/// Annual sigma for the simulation: final-day variance for EWMA and GARCH(1,1),
/// path mean for the reversion and asymmetric models.
double model_sigma_for_simulation(const VariancePath& path, double days = kTradingDays);
double model_sigma_for_simulation(std::span<const double> variances, SigmaConvention convention,
                                  double days = kTradingDays);

} // namespace volvar::vol
