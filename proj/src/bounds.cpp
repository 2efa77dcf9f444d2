#include "aoitail/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aoitail/errors.hpp"
#include "minimize.hpp"

namespace aoitail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double hop_capacity(const ServiceDistribution& hop) {
    if (hop.kind() == DistKind::deterministic && hop.value() == 0.0) {
        return kInf;
    }
    return hop.mean_rate();
}

void validate_config(const SystemConfig& cfg) {
    if (cfg.hops.empty()) {
        throw std::invalid_argument("system config needs at least one hop");
    }
    if (!(cfg.rate > 0.0)) {
        throw std::invalid_argument("system config needs a positive rate");
    }
    if (!(cfg.age_limit > 0.0)) {
        throw std::invalid_argument("system config needs a positive age limit");
    }
}

// Upper end of one hop's stability range: the unique root of
// ln mgf(s) - s/rate on (0, domain sup), found by bracketing + bisection.
// Precondition: rate < hop capacity.
double hop_s_high(const ServiceDistribution& hop, double rate) {
    const double dsup = hop.mgf_domain_sup();
    if (std::isinf(dsup)) {
        // Deterministic service b (or geometric with p = 1): the ratio is
        // e^{s(b - 1/rate)} < 1 for every s > 0 once rate < 1/b.
        return kInf;
    }
    auto h = [&](double s) {
        const double m = hop.mgf(s);
        return std::isfinite(m) ? std::log(m) - s / rate : kInf;
    };
    // h(0) = 0 with negative slope; h diverges at the domain boundary.
    double hi = dsup;
    double frac = 0.5;
    while (!(h(hi * frac) > 0.0) && frac < 1.0 - 1e-14) {
        frac = 1.0 - 0.5 * (1.0 - frac);
    }
    hi = dsup * frac;
    double lo = dsup * 0.25;
    while (!(h(lo) < 0.0) && lo > 1e-300) {
        lo *= 0.5;
    }
    const double tol = 1e-10 * std::max(1.0, dsup);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double SystemConfig::bottleneck_rate() const {
    double rate = kInf;
    for (const auto& hop : hops) {
        rate = std::min(rate, hop_capacity(hop));
    }
    return rate;
}

bool SystemConfig::feasible() const {
    return !hops.empty() && rate > 0.0 && age_limit > 0.0 && rate * age_limit >= 1.0 &&
           rate < bottleneck_rate();
}

double beta(const ServiceDistribution& hop, double s, double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("beta: rate must be positive");
    }
    const double m = hop.mgf(s);
    return std::isfinite(m) ? m * std::exp(-s / rate) : kInf;
}

StabilityWindow stability_window(const SystemConfig& cfg) {
    validate_config(cfg);
    StabilityWindow window;
    window.s_low = 0.0;
    window.s_high = kInf;
    for (const auto& hop : cfg.hops) {
        if (!(cfg.rate < hop_capacity(hop))) {
            return window;  // empty: this hop's ratio never drops below one
        }
        window.s_high = std::min(window.s_high, hop_s_high(hop, cfg.rate));
    }
    window.empty = false;
    return window;
}

double phi_single(const ServiceDistribution& hop, int v, double rate, double age_limit) {
    if (v < 0) {
        throw std::invalid_argument("phi_single: v must be >= 0");
    }
    return hop.sum_tail(v + 1, age_limit + (v - 1) / rate);
}

double phi_two(const ServiceDistribution& hop1, const ServiceDistribution& hop2, int v0, int v1,
               double rate, double age_limit) {
    if (v0 < 0 || v1 < 0) {
        throw std::invalid_argument("phi_two: v0 and v1 must be >= 0");
    }
    return cross_sum_tail(hop1, v1 + 1, hop2, v0 + 1, age_limit + (v0 + v1 - 1) / rate);
}

double psi_chernoff(const SystemConfig& cfg, double s) {
    validate_config(cfg);
    if (!(s > 0.0)) {
        return kInf;
    }
    const double decay = std::exp(-s / cfg.rate);
    double value = std::exp(-s * (cfg.age_limit - 1.0 / cfg.rate));
    for (const auto& hop : cfg.hops) {
        const double m = hop.mgf(s);
        if (!std::isfinite(m)) {
            return kInf;
        }
        const double b = m * decay;
        if (b >= 1.0) {
            return kInf;
        }
        value *= m / (1.0 - b);
    }
    return value;
}

BoundResult minimize_psi_over_s(const SystemConfig& cfg) {
    const StabilityWindow window = stability_window(cfg);
    if (window.empty) {
        throw InfeasibleError("rate " + std::to_string(cfg.rate) +
                              " reaches a hop's service capacity; no stable bound exists");
    }
    const auto [s_star, value] =
        detail::minimize_convex(window.s_low, window.s_high,
                                [&](double s) { return psi_chernoff(cfg, s); });
    return BoundResult{value, s_star, BoundKind::chernoff, 0, std::nullopt};
}

namespace {

BoundResult alpha_relaxed_impl(const SystemConfig& cfg, int terms, double partial) {
    const StabilityWindow window = stability_window(cfg);
    if (window.empty) {
        throw InfeasibleError("rate " + std::to_string(cfg.rate) +
                              " reaches a hop's service capacity; no stable bound exists");
    }
    const double slack = cfg.age_limit - 1.0 / cfg.rate;
    auto tail = [&](double s) -> double {
        if (!(s > 0.0)) {
            return kInf;
        }
        const double decay = std::exp(-s / cfg.rate);
        double mgf_product = 1.0;
        double geometric = 1.0;  // series factor outside the first `terms` windows
        if (cfg.hops.size() == 1) {
            const double m = cfg.hops[0].mgf(s);
            if (!std::isfinite(m)) return kInf;
            const double b = m * decay;
            if (b >= 1.0) return kInf;
            mgf_product = m;
            geometric = std::pow(b, terms) / (1.0 - b);
        } else {
            const double m1 = cfg.hops[0].mgf(s);
            const double m2 = cfg.hops[1].mgf(s);
            if (!std::isfinite(m1) || !std::isfinite(m2)) return kInf;
            const double b1 = m1 * decay;
            const double b2 = m2 * decay;
            if (b1 >= 1.0 || b2 >= 1.0) return kInf;
            mgf_product = m1 * m2;
            geometric = alpha_tail_factor(b1, b2, terms);
        }
        return std::exp(-s * slack) * mgf_product * geometric;
    };
    const auto [s_star, tail_min] = detail::minimize_convex(window.s_low, window.s_high, tail);
    BoundResult result;
    result.value = partial + tail_min;
    result.s_star = s_star;
    result.kind = BoundKind::alpha_relaxed;
    result.terms = terms;
    if (partial > 0.0) {
        result.alpha = 1.0 + tail_min / partial;
    }
    return result;
}

}  // namespace

BoundResult alpha_relaxed_single(const SystemConfig& cfg, int terms) {
    validate_config(cfg);
    if (cfg.hops.size() != 1) {
        throw std::invalid_argument("alpha_relaxed_single expects exactly one hop");
    }
    if (terms < 1) {
        throw std::invalid_argument("alpha_relaxed_single: terms must be >= 1");
    }
    double partial = 0.0;
    for (int v = 0; v < terms; ++v) {
        partial += phi_single(cfg.hops[0], v, cfg.rate, cfg.age_limit);
    }
    return alpha_relaxed_impl(cfg, terms, partial);
}

BoundResult alpha_relaxed_two(const SystemConfig& cfg, int terms) {
    validate_config(cfg);
    if (cfg.hops.size() != 2) {
        throw std::invalid_argument("alpha_relaxed_two expects exactly two hops");
    }
    if (terms < 1) {
        throw std::invalid_argument("alpha_relaxed_two: terms must be >= 1");
    }
    double partial = 0.0;
    for (int v0 = 0; v0 < terms; ++v0) {
        for (int v1 = 0; v1 < terms; ++v1) {
            partial += phi_two(cfg.hops[0], cfg.hops[1], v0, v1, cfg.rate, cfg.age_limit);
        }
    }
    return alpha_relaxed_impl(cfg, terms, partial);
}

double phi_closed_form(double beta1, double beta2) {
    if (!(beta1 >= 0.0) || beta1 >= 1.0 || !(beta2 >= 0.0) || beta2 >= 1.0) {
        throw std::domain_error("phi_closed_form: arguments must lie in [0, 1)");
    }
    return 1.0 / ((1.0 - beta1) * (1.0 - beta2));
}

double alpha_tail_factor(double beta1, double beta2, int terms) {
    if (!(beta1 >= 0.0) || beta1 >= 1.0 || !(beta2 >= 0.0) || beta2 >= 1.0) {
        throw std::domain_error("alpha_tail_factor: arguments must lie in [0, 1)");
    }
    if (terms < 1) {
        throw std::invalid_argument("alpha_tail_factor: terms must be >= 1");
    }
    const double b1k = std::pow(beta1, terms);
    const double b2k = std::pow(beta2, terms);
    return (b1k + b2k - b1k * b2k) / ((1.0 - beta1) * (1.0 - beta2));
}

std::optional<double> bounded_support_zero_rate(const SystemConfig& cfg, double support_bound) {
    validate_config(cfg);
    if (!(support_bound > 0.0)) {
        throw std::domain_error("bounded_support_zero_rate: support bound must be positive");
    }
    for (const auto& hop : cfg.hops) {
        if (!(hop.support_max() <= support_bound)) {
            throw std::domain_error("bounded_support_zero_rate: hop '" + hop.describe() +
                                    "' is not bounded by the given support bound");
        }
    }
    const double n = static_cast<double>(cfg.hops.size());
    if (cfg.age_limit >= (n + 1.0) * support_bound) {
        return (n + 1.0) / cfg.age_limit;
    }
    return std::nullopt;
}

}  // namespace aoitail
