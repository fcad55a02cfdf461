#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace volvar::opt {

struct NelderMeadOptions {
    double initial_step = 0.5;       ///< simplex edge length along each axis
    double f_tolerance = 1e-8;       ///< stop when f(worst) - f(best) falls below this
    std::size_t max_iterations = 10000;
    std::size_t max_restarts = 5;    ///< rebuilds of the simplex around the incumbent
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
};

/// Derivative-free minimization of `f` (Nelder-Mead with standard
/// reflection/expansion/contraction/shrink coefficients 1, 2, 1/2, 1/2).
///
/// Non-finite objective values are treated as +infinity, so `f` can signal an
/// infeasible point by returning infinity. After tolerance convergence the
/// simplex is rebuilt around the best vertex; the search stops once a restart
/// no longer improves the value by more than `f_tolerance`. Fully
/// deterministic: ties are broken by vertex index.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options = {});

} // namespace volvar::opt
