/**
 * @file mle.hpp
 * @brief Gaussian maximum-likelihood fit of GARCH(1,1).
 *
 * Innovations are zero-mean Gaussian: r_t ~ N(0, s2_t) with s2_t from the
 * GARCH(1,1) recursion. The fit maximizes over an unconstrained vector
 * (log omega, a, b) mapped onto the feasible region by
 *
 *   omega = exp(log omega)
 *   alpha = c * e^a / (1 + e^a + e^b),  beta = c * e^b / (1 + e^a + e^b),  c = 1 - 1e-6
 *
 * so omega > 0, alpha, beta >= 0 and alpha + beta < 1 - 1e-6 hold at every
 * point the optimizer can visit.
 */
#pragma once

#include "volvar/ingest.hpp"
#include "volvar/volmodels.hpp"

#include <cstddef>
#include <limits>
#include <span>

namespace volvar::mle {

inline constexpr double kStationarityMargin = 1e-6;
inline constexpr std::size_t kMinFitLength = 100;

/// Terms [first, first + count) of the log-likelihood sum are evaluated.
struct LikelihoodWindow {
    std::size_t first = 0;
    std::size_t count = std::numeric_limits<std::size_t>::max();
};

/// Sum over the window of -0.5*ln(2*pi) - 0.5*ln(s2_t) - r_t^2 / (2*s2_t), where
/// s2_0 = seed_variance. Throws EvaluationError when any s2_t in the window
/// (or leading up to it) is not strictly positive.
double garch_log_likelihood(std::span<const double> returns, const vol::Garch11& params,
                            double seed_variance, LikelihoodWindow window = {});
double garch_log_likelihood(const ingest::ReturnSeries& returns, const vol::Garch11& params,
                            double seed_variance, LikelihoodWindow window = {});

struct FitOptions {
    double f_tolerance = 1e-8;
    std::size_t max_iterations = 10000;
};

struct GarchFitResult {
    vol::Garch11 params;
    double log_likelihood = 0.0;  ///< conditional on the first observation (terms t >= 1)
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    double persistence = 0.0;
    double seed_variance = 0.0;
    vol::Garch11 initial_guess;
};

/// Maps an unconstrained point to feasible parameters and back.
vol::Garch11 to_params(std::span<const double> theta);
std::vector<double> to_unconstrained(const vol::Garch11& params);

/// Refuses series shorter than kMinFitLength with ValidationError.
GarchFitResult fit_garch_mle(const ingest::ReturnSeries& returns, const FitOptions& options = {});

} // namespace volvar::mle
