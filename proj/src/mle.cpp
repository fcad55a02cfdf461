#include "volvar/mle.hpp"

#include "volvar/errors.hpp"
#include "volvar/nelder_mead.hpp"

#include <algorithm>
#include <cmath>

namespace volvar::mle {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2*pi)

} // namespace

double garch_log_likelihood(std::span<const double> returns, const vol::Garch11& params,
                            double seed_variance, LikelihoodWindow window) {
    vol::validate(params);
    if (window.first > returns.size()) {
        throw ParameterError("likelihood window starts past the end of the series");
    }
    const std::size_t end =
        window.first + std::min(window.count, returns.size() - window.first);

    double loglik = 0.0;
    double variance = seed_variance;
    for (std::size_t t = 0; t < end; ++t) {
        if (t > 0) variance = params.omega + params.alpha * returns[t - 1] * returns[t - 1] +
                              params.beta * variance;
        if (!(variance > 0.0) || !std::isfinite(variance)) {
            throw EvaluationError("non-positive conditional variance at t=" + std::to_string(t));
        }
        if (t >= window.first) {
            loglik += -kHalfLog2Pi - 0.5 * std::log(variance) -
                      returns[t] * returns[t] / (2.0 * variance);
        }
    }
    return loglik;
}

double garch_log_likelihood(const ingest::ReturnSeries& returns, const vol::Garch11& params,
                            double seed_variance, LikelihoodWindow window) {
    return garch_log_likelihood(std::span<const double>(returns.returns), params, seed_variance,
                                window);
}

vol::Garch11 to_params(std::span<const double> theta) {
    const double top = std::max({0.0, theta[1], theta[2]});
    const double e0 = std::exp(-top);
    const double ea = std::exp(theta[1] - top);
    const double eb = std::exp(theta[2] - top);
    const double scale = (1.0 - kStationarityMargin) / (e0 + ea + eb);
    vol::Garch11 g{std::exp(theta[0]), scale * ea, scale * eb};
    // The sum can round an ulp past the margin; trim the larger term until it cannot.
    while (g.alpha + g.beta > 1.0 - kStationarityMargin) {
        double& big = g.alpha > g.beta ? g.alpha : g.beta;
        big = std::nextafter(big, 0.0);
    }
    return g;
}

std::vector<double> to_unconstrained(const vol::Garch11& params) {
    const double slack = (1.0 - kStationarityMargin) - params.alpha - params.beta;
    if (!(params.omega > 0.0 && params.alpha > 0.0 && params.beta > 0.0 && slack > 0.0)) {
        throw ParameterError("parameters are not in the interior of the feasible region");
    }
    return {std::log(params.omega), std::log(params.alpha / slack), std::log(params.beta / slack)};
}

GarchFitResult fit_garch_mle(const ingest::ReturnSeries& returns, const FitOptions& options) {
    if (returns.size() < kMinFitLength) {
        throw ValidationError(returns.asset_id + ": GARCH fit needs at least " +
                              std::to_string(kMinFitLength) + " returns, got " +
                              std::to_string(returns.size()));
    }
    const std::span<const double> r(returns.returns);
    const double seed = ingest::sample_variance(r);
    if (!(seed > 0.0)) throw ValidationError(returns.asset_id + ": zero-variance series");

    // Conditioning on the first observation: the t = 0 term depends only on
    // the seed, so it is left out of the objective.
    const LikelihoodWindow window{1, r.size() - 1};
    auto objective = [&](const std::vector<double>& theta) {
        try {
            return -garch_log_likelihood(r, to_params(theta), seed, window);
        } catch (const EvaluationError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    GarchFitResult result;
    result.seed_variance = seed;
    result.initial_guess = vol::Garch11{0.05 * seed, 0.10, 0.85};

    opt::NelderMeadOptions nm;
    nm.f_tolerance = options.f_tolerance;
    nm.max_iterations = options.max_iterations;
    const auto found = opt::nelder_mead(objective, to_unconstrained(result.initial_guess), nm);

    result.params = to_params(found.x);
    result.log_likelihood = -found.value;
    result.converged = found.converged;
    result.iterations = found.iterations;
    result.evaluations = found.evaluations;
    result.persistence = result.params.persistence();
    return result;
}

} // namespace volvar::mle
