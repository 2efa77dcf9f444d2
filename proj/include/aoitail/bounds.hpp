#pragma once

#include <optional>
#include <vector>

#include "aoitail/dist.hpp"

namespace aoitail {

// One periodic source streaming through N FCFS hops in series.
struct SystemConfig {
    std::vector<ServiceDistribution> hops;
    double rate = 0.0;       // packets generated per time unit, at instants n/rate
    double age_limit = 0.0;  // age threshold d

    std::size_t hop_count() const { return hops.size(); }

    // Smallest hop service rate; pass-through hops (deterministic(0)) do not
    // constrain it.
    double bottleneck_rate() const;

    // 1/d <= rate < bottleneck rate: at least one packet per age window, and
    // stable queues.
    bool feasible() const;
};

// Open interval of transform arguments where every hop satisfies
// mgf(s) < e^{s/rate}.  s_high is +infinity when all hops are deterministic
// and fast enough; `empty` is set when the rate reaches any hop's capacity.
struct StabilityWindow {
    double s_low = 0.0;
    double s_high = 0.0;
    bool empty = true;

    bool contains(double s) const { return !empty && s > s_low && s < s_high; }
};

enum class BoundKind { chernoff, alpha_relaxed };

struct BoundResult {
    double value = 0.0;   // bound on the violation probability; may exceed 1
    double s_star = 0.0;  // minimizing transform argument
    BoundKind kind = BoundKind::chernoff;
    int terms = 0;        // K for the alpha-relaxed family, 0 otherwise
    // Worst-case ratio of the relaxed bound to the full union-bound series;
    // absent when the partial sum is exactly zero.
    std::optional<double> alpha;
};

// Per-hop decay ratio mgf(s) e^{-s/rate}; the geometric-series generator
// behind every bound here.
double beta(const ServiceDistribution& hop, double s, double rate);

StabilityWindow stability_window(const SystemConfig& cfg);

// Union-bound term: probability that v+1 consecutive services exceed the age
// limit plus the accumulated inter-arrival slack (v-1)/rate.
double phi_single(const ServiceDistribution& hop, int v, double rate, double age_limit);

// Two-hop union-bound term: hop 1 contributes a window of v1+1 draws and hop 2
// a window of v0+1 draws against slack (v0+v1-1)/rate.
double phi_two(const ServiceDistribution& hop1, const ServiceDistribution& hop2, int v0, int v1,
               double rate, double age_limit);

// Product-form transform bound at a fixed s; +infinity outside the stability
// window (in-band, no throw).
double psi_chernoff(const SystemConfig& cfg, double s);

// Minimum of psi_chernoff over the stability window (convex in s).
// Throws InfeasibleError when the window is empty.
BoundResult minimize_psi_over_s(const SystemConfig& cfg);

// Exact partial sum of `terms` union-bound terms plus the minimized geometric
// tail.  Single-hop and two-hop variants; both throw InfeasibleError when the
// stability window is empty.
BoundResult alpha_relaxed_single(const SystemConfig& cfg, int terms);
BoundResult alpha_relaxed_two(const SystemConfig& cfg, int terms);

// Closed form of the full double geometric series sum_{v0,v1 >= 0} b1^v1 b2^v0.
// Throws std::domain_error unless both arguments lie in [0, 1).
double phi_closed_form(double beta1, double beta2);

// Closed form of the same series outside the K x K square — the tail factor of
// the two-hop alpha-relaxed bound.
double alpha_tail_factor(double beta1, double beta2, int terms);

// Rate with provably zero violation when every hop's service time is bounded
// by support_bound: (N+1)/d when d >= (N+1) * support_bound, otherwise
// nullopt.  Throws std::domain_error if some hop has unbounded support above
// support_bound.
std::optional<double> bounded_support_zero_rate(const SystemConfig& cfg, double support_bound);

}  // namespace aoitail
