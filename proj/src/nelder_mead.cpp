#include "volvar/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace volvar::opt {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Simplex {
    std::vector<std::vector<double>> points;
    std::vector<double> values;
};

class Minimizer {
public:
    Minimizer(const std::function<double(const std::vector<double>&)>& f,
              const NelderMeadOptions& options)
        : f_(f), options_(options) {}

    double eval(const std::vector<double>& x) {
        ++evaluations_;
        const double v = f_(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }

    Simplex build(const std::vector<double>& centre) {
        Simplex s;
        s.points.push_back(centre);
        for (std::size_t i = 0; i < centre.size(); ++i) {
            auto p = centre;
            p[i] += options_.initial_step;
            s.points.push_back(std::move(p));
        }
        for (const auto& p : s.points) s.values.push_back(eval(p));
        return s;
    }

    /// Runs until tolerance or the iteration budget. Returns true on tolerance.
    bool run(Simplex& s, std::size_t& iterations) {
        const std::size_t n = s.points.size() - 1;
        std::vector<std::size_t> order(n + 1);
        while (true) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return s.values[a] < s.values[b]; });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second_worst = order[n - 1];

            const double spread = s.values[worst] - s.values[best];
            if (std::isfinite(s.values[worst]) && spread <= options_.f_tolerance) return true;
            if (iterations >= options_.max_iterations) return false;
            ++iterations;

            std::vector<double> centroid(n, 0.0);
            for (std::size_t k = 0; k <= n; ++k) {
                if (k == worst) continue;
                for (std::size_t i = 0; i < n; ++i) centroid[i] += s.points[k][i];
            }
            for (auto& c : centroid) c /= static_cast<double>(n);

            auto along = [&](double coeff) {
                std::vector<double> p(n);
                for (std::size_t i = 0; i < n; ++i) {
                    p[i] = centroid[i] + coeff * (centroid[i] - s.points[worst][i]);
                }
                return p;
            };

            auto reflected = along(kReflect);
            const double f_reflected = eval(reflected);
            if (f_reflected < s.values[best]) {
                auto expanded = along(kExpand);
                const double f_expanded = eval(expanded);
                if (f_expanded < f_reflected) {
                    replace(s, worst, std::move(expanded), f_expanded);
                } else {
                    replace(s, worst, std::move(reflected), f_reflected);
                }
                continue;
            }
            if (f_reflected < s.values[second_worst]) {
                replace(s, worst, std::move(reflected), f_reflected);
                continue;
            }

            const bool outside = f_reflected < s.values[worst];
            auto contracted = along(outside ? kContract : -kContract);
            const double f_contracted = eval(contracted);
            if (f_contracted < (outside ? f_reflected : s.values[worst])) {
                replace(s, worst, std::move(contracted), f_contracted);
                continue;
            }

            for (std::size_t k = 0; k <= n; ++k) {
                if (k == best) continue;
                for (std::size_t i = 0; i < n; ++i) {
                    s.points[k][i] =
                        s.points[best][i] + kShrink * (s.points[k][i] - s.points[best][i]);
                }
                s.values[k] = eval(s.points[k]);
            }
        }
    }

    [[nodiscard]] std::size_t evaluations() const noexcept { return evaluations_; }

private:
    static void replace(Simplex& s, std::size_t index, std::vector<double> point, double value) {
        s.points[index] = std::move(point);
        s.values[index] = value;
    }

    const std::function<double(const std::vector<double>&)>& f_;
    NelderMeadOptions options_;
    std::size_t evaluations_ = 0;
};

std::size_t best_index(const Simplex& s) {
    return static_cast<std::size_t>(
        std::min_element(s.values.begin(), s.values.end()) - s.values.begin());
}

} // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options) {
    if (start.empty()) throw std::invalid_argument("nelder_mead: empty start point");

    Minimizer minimizer(f, options);
    NelderMeadResult result;
    Simplex simplex = minimizer.build(start);
    bool converged = minimizer.run(simplex, result.iterations);
    std::size_t best = best_index(simplex);

    for (std::size_t restart = 0; converged && restart < options.max_restarts; ++restart) {
        const double before = simplex.values[best];
        Simplex fresh = minimizer.build(simplex.points[best]);
        converged = minimizer.run(fresh, result.iterations);
        const std::size_t fresh_best = best_index(fresh);
        const bool improved = fresh.values[fresh_best] < before - options.f_tolerance;
        if (fresh.values[fresh_best] < before) {
            simplex = std::move(fresh);
            best = fresh_best;
        }
        if (!improved) break;
    }

    result.x = simplex.points[best];
    result.value = simplex.values[best];
    result.converged = converged && std::isfinite(result.value);
    result.evaluations = minimizer.evaluations();
    return result;
}

} // namespace volvar::opt
