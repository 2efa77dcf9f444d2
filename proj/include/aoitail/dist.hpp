#pragma once

#include <string>
#include <string_view>

#include "aoitail/rng.hpp"

namespace aoitail {

enum class DistKind { geometric, exponential, erlang, hyperexponential, deterministic };

// Service-time distribution of one hop.  All parameters use one consistent
// time unit (the bundled configs use milliseconds).
class ServiceDistribution {
  public:
    // Number of slots until first success: P{X = k*slot} = p (1-p)^(k-1), k >= 1.
    static ServiceDistribution geometric(double success_prob, double slot = 1.0);
    static ServiceDistribution exponential(double rate);
    static ServiceDistribution erlang(int shape, double rate);
    static ServiceDistribution hyperexponential(double mix_prob, double rate1, double rate2);
    static ServiceDistribution deterministic(double value);

    // Parses "kind(name=value, ...)", e.g. "exponential(mu=1)",
    // "geometric(p=0.85,slot=1)", "erlang(b=3,lambda=3)",
    // "hyperexponential(p=0.91,lambda1=0.95,lambda2=2)", "deterministic(b=1)".
    // Throws ConfigError on malformed input.
    static ServiceDistribution parse(std::string_view text);

    DistKind kind() const { return kind_; }

    // E[e^{sX}]; +infinity outside the convergence strip.
    double mgf(double s) const;

    // Least upper bound of the MGF convergence strip; +infinity when the MGF
    // is finite on the whole axis.
    double mgf_domain_sup() const;

    // 1 / E[X].  Throws std::domain_error for deterministic(0), whose mean is
    // zero (a pass-through hop imposes no rate constraint).
    double mean_rate() const;

    double support_min() const;
    double support_max() const;

    // P{X_1 + ... + X_n > x} for iid copies.  Geometric sums resolve on the
    // slot lattice (x is floored to whole slots); hyperexponential sums fall
    // back to numerical convolution and throw BudgetError past the budget.
    double sum_tail(int n, double x, int convolution_budget = kDefaultConvolutionBudget) const;

    double sample(Rng& rng) const;

    // Round-trips through parse().
    std::string describe() const;

    bool operator==(const ServiceDistribution& other) const = default;

    // kind-specific parameters (meaning depends on kind())
    double success_prob() const { return p_; }
    double slot() const { return slot_; }
    double rate1() const { return rate1_; }
    double rate2() const { return rate2_; }
    double mix_prob() const { return mix_; }
    int shape() const { return shape_; }
    double value() const { return value_; }

    static constexpr int kDefaultConvolutionBudget = 8;

  private:
    ServiceDistribution() = default;

    DistKind kind_ = DistKind::deterministic;
    double p_ = 0.0;
    double slot_ = 0.0;
    double rate1_ = 0.0;
    double rate2_ = 0.0;
    double mix_ = 0.0;
    int shape_ = 0;
    double value_ = 0.0;
};

// P{Y1 + Y2 > x} with Y1 an n1-fold iid sum drawn from d1 and Y2 an n2-fold
// iid sum drawn from d2 (independent).  Lattice parts are enumerated exactly;
// continuous parts reduce to gamma-component tails, evaluated in closed form
// when rates coincide and by adaptive quadrature otherwise.
double cross_sum_tail(const ServiceDistribution& d1, int n1, const ServiceDistribution& d2,
                      int n2, double x,
                      int convolution_budget = ServiceDistribution::kDefaultConvolutionBudget);

}  // namespace aoitail
