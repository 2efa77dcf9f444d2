#include "aoitail/optimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aoitail/errors.hpp"
#include "minimize.hpp"

namespace aoitail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bottleneck(const std::vector<ServiceDistribution>& hops) {
    SystemConfig cfg{hops, 1.0, 1.0};
    return cfg.bottleneck_rate();
}

}  // namespace

RateSolution solve_chernoff_ubmp(const std::vector<ServiceDistribution>& hops, double age_limit,
                                 std::optional<std::pair<double, double>> rate_bounds) {
    if (hops.empty()) {
        throw std::invalid_argument("solve_chernoff_ubmp: needs at least one hop");
    }
    if (!(age_limit > 0.0)) {
        throw std::invalid_argument("solve_chernoff_ubmp: age limit must be positive");
    }
    const double mu = bottleneck(hops);
    double t_lo = std::isinf(mu) ? 0.0 : 1.0 / mu;  // open end: rate < mu
    double t_hi = age_limit;                        // closed end: rate >= 1/d
    if (rate_bounds) {
        const auto [r_lo, r_hi] = *rate_bounds;
        if (!(r_lo > 0.0) || !(r_hi >= r_lo)) {
            throw std::invalid_argument("solve_chernoff_ubmp: bad rate bounds");
        }
        t_lo = std::max(t_lo, 1.0 / r_hi);
        t_hi = std::min(t_hi, 1.0 / r_lo);
    }
    if (!(t_lo < t_hi)) {
        throw InfeasibleError("no feasible rate: the age limit requires a rate at or above the "
                              "bottleneck service rate");
    }
    auto objective = [&](double t) -> double {
        const SystemConfig cfg{hops, 1.0 / t, age_limit};
        try {
            return minimize_psi_over_s(cfg).value;
        } catch (const InfeasibleError&) {
            return kInf;
        }
    };
    // The golden section never evaluates the open endpoint at t_lo; shrink the
    // closed end in by nothing (t = d is a valid probe).
    auto [t_star, value] = detail::golden_section(t_lo, t_hi, objective, 1e-6 * age_limit);
    (void)value;
    const SystemConfig best{hops, 1.0 / t_star, age_limit};
    const BoundResult bound = minimize_psi_over_s(best);
    RateSolution sol;
    sol.rate = 1.0 / t_star;
    sol.objective = bound.value;
    sol.s_star = bound.s_star;
    sol.method = SolveMethod::chernoff_ubmp;
    sol.grid_step = 0.0;
    return sol;
}

RateSolution solve_alpha_ubmp(const std::vector<ServiceDistribution>& hops, double age_limit,
                              int terms, double grid_step) {
    if (hops.empty() || hops.size() > 2) {
        throw std::invalid_argument("solve_alpha_ubmp: supports one or two hops");
    }
    if (!(age_limit > 0.0)) {
        throw std::invalid_argument("solve_alpha_ubmp: age limit must be positive");
    }
    if (terms < 1) {
        throw std::invalid_argument("solve_alpha_ubmp: terms must be >= 1");
    }
    if (!(grid_step > 0.0)) {
        throw std::invalid_argument("solve_alpha_ubmp: grid step must be positive");
    }
    const double mu = bottleneck(hops);
    const double r_min = 1.0 / age_limit;
    if (!(r_min < mu)) {
        throw InfeasibleError("no feasible rate: the age limit requires a rate at or above the "
                              "bottleneck service rate");
    }
    RateSolution sol;
    sol.method = SolveMethod::alpha_ubmp;
    sol.grid_step = grid_step;
    sol.objective = kInf;
    for (int j = 0;; ++j) {
        const double rate = r_min + j * grid_step;
        if (!(rate < mu)) {
            break;
        }
        const SystemConfig cfg{hops, rate, age_limit};
        const BoundResult bound =
            hops.size() == 1 ? alpha_relaxed_single(cfg, terms) : alpha_relaxed_two(cfg, terms);
        // strict less-than keeps the first (smallest) rate on ties
        if (bound.value < sol.objective) {
            sol.objective = bound.value;
            sol.rate = rate;
            sol.s_star = bound.s_star;
        }
    }
    return sol;
}

}  // namespace aoitail
