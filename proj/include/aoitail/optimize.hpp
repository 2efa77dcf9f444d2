#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aoitail/bounds.hpp"

namespace aoitail {

enum class SolveMethod { chernoff_ubmp, alpha_ubmp };

struct RateSolution {
    double rate = 0.0;
    double objective = 0.0;  // bound value at the returned rate
    double s_star = 0.0;     // inner minimizer at the returned rate
    SolveMethod method = SolveMethod::chernoff_ubmp;
    double grid_step = 0.0;  // grid resolution of the alpha solver; 0 otherwise
};

// Minimizes the Chernoff bound jointly over (s, rate): golden-section on the
// period T = 1/rate (where the objective is convex) over (1/mu, d], with the
// inner minimization over s at each probe.  rate_bounds optionally restricts
// the rate range.  Throws InfeasibleError when no feasible rate exists.
RateSolution solve_chernoff_ubmp(const std::vector<ServiceDistribution>& hops, double age_limit,
                                 std::optional<std::pair<double, double>> rate_bounds = std::nullopt);

// Minimizes the alpha-relaxed bound over the rate grid {1/d + j * grid_step}
// intersected with [1/d, mu); ties break toward the smaller rate.  Supports
// one or two hops.  Throws InfeasibleError when the grid is empty.
RateSolution solve_alpha_ubmp(const std::vector<ServiceDistribution>& hops, double age_limit,
                              int terms = 30, double grid_step = 0.025);

}  // namespace aoitail
