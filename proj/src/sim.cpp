#include "aoitail/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "aoitail/errors.hpp"
#include "aoitail/rng.hpp"
#include "aoitail/specfun.hpp"
#include "num_text.hpp"
#include "parallel.hpp"

namespace aoitail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void structural_check(bool ok, const char* what) {
    if (!ok) throw std::logic_error(what);
}

// 97.5% quantile of Student's t distribution with df degrees of freedom,
// via bisection on the CDF expressed through the regularized incomplete
// beta function.
double student_t_975(int df) {
    if (df < 1) throw std::invalid_argument("student_t_975: df must be >= 1");
    const double nu = static_cast<double>(df);
    auto cdf = [nu](double x) {
        const double z = nu / (nu + x * x);
        return 1.0 - 0.5 * specfun::incomplete_beta_reg(z, 0.5 * nu, 0.5);
    };
    double lo = 0.0;
    double hi = 64.0;
    while (cdf(hi) < 0.975) hi *= 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < 0.975 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Accumulates the time the instantaneous age spends above the limit over
// [warmup, horizon], split into equal-width batches for the confidence
// interval.  Deliveries must arrive in nondecreasing time order; the
// freshest delivered generation so far is the age reference.
class AoiAccumulator {
  public:
    AoiAccumulator(double age_limit, double warmup, double horizon, int batches)
        : age_limit_(age_limit),
          warmup_(warmup),
          horizon_(horizon),
          width_((horizon - warmup) / batches),
          batch_(static_cast<std::size_t>(batches), 0.0) {}

    void deliver(double t, double generation) {
        structural_check(t >= prev_, "deliveries must be time ordered");
        close_interval(t);
        if (generation > ref_) ref_ = generation;
    }

    void finish() { close_interval(horizon_); }

    double fraction() const { return total_ / (horizon_ - warmup_); }

    double half_width() const {
        const int b = static_cast<int>(batch_.size());
        double mean = 0.0;
        for (double v : batch_) mean += v / width_;
        mean /= b;
        double var = 0.0;
        for (double v : batch_) {
            const double f = v / width_;
            var += (f - mean) * (f - mean);
        }
        var /= (b - 1);
        return student_t_975(b - 1) * std::sqrt(var / b);
    }

  private:
    // The age exceeds the limit on [ref + d, t); clip to the measurement
    // window and spread across batch bins.
    void close_interval(double t) {
        double lo = std::max(prev_, ref_ + age_limit_);
        double hi = t;
        prev_ = std::max(prev_, t);
        lo = std::max(lo, warmup_);
        hi = std::min(hi, horizon_);
        if (hi <= lo) return;
        total_ += hi - lo;
        const int nbatch = static_cast<int>(batch_.size());
        int b0 = static_cast<int>((lo - warmup_) / width_);
        int b1 = static_cast<int>((hi - warmup_) / width_);
        b0 = std::clamp(b0, 0, nbatch - 1);
        b1 = std::clamp(b1, 0, nbatch - 1);
        for (int b = b0; b <= b1; ++b) {
            const double edge_lo = warmup_ + b * width_;
            const double edge_hi = warmup_ + (b + 1) * width_;
            const double overlap = std::min(hi, edge_hi) - std::max(lo, edge_lo);
            if (overlap > 0.0) batch_[static_cast<std::size_t>(b)] += overlap;
        }
    }

    double age_limit_;
    double warmup_;
    double horizon_;
    double width_;
    std::vector<double> batch_;
    double prev_ = 0.0;
    double ref_ = 0.0;  // virtual fresh packet at t = 0
    double total_ = 0.0;
};

void log_event(EventLog* log, double time, int node, std::int64_t packet, EventKind kind) {
    if (log) log->push_back(SimEvent{time, node, packet, kind});
}

// One station of the tandem under a unit-buffer policy: one packet in
// service plus at most one waiting.  fcfs_unit_buffer drops the newcomer
// when the waiting slot is taken; lgfs_unit_buffer replaces the waiting
// packet with the newer generation.
struct UbNode {
    bool busy = false;
    double depart_time = 0.0;
    double serve_gen = 0.0;
    std::int64_t serve_id = 0;
    bool waiting = false;
    double wait_gen = 0.0;
    std::int64_t wait_id = 0;
};

template <class Sink>
class UbTandem {
  public:
    UbTandem(const SystemConfig& cfg, Policy policy, std::uint64_t seed, Sink sink,
             EventLog* log)
        : cfg_(cfg), policy_(policy), sink_(sink), log_(log), nodes_(cfg.hop_count()) {
        rng_.reserve(cfg.hop_count());
        for (std::size_t k = 0; k < cfg.hop_count(); ++k) rng_.emplace_back(seed, k);
    }

    void arrive(std::size_t k, double t, double generation, std::int64_t id) {
        advance(k, t);
        log_event(log_, t, static_cast<int>(k) + 1, id, EventKind::arrival);
        UbNode& node = nodes_[k];
        if (!node.busy) {
            start_service(k, t, generation, id);
        } else if (!node.waiting) {
            node.waiting = true;
            node.wait_gen = generation;
            node.wait_id = id;
        } else if (policy_ == Policy::fcfs_unit_buffer) {
            log_event(log_, t, static_cast<int>(k) + 1, id, EventKind::drop);
        } else {
            structural_check(generation > node.wait_gen,
                             "arrivals must carry increasing generations");
            log_event(log_, t, static_cast<int>(k) + 1, node.wait_id, EventKind::drop);
            node.wait_gen = generation;
            node.wait_id = id;
        }
    }

    // Completes every departure at node k up to time t, feeding each one to
    // the next node (or the sink) before the next arrival is looked at.
    void advance(std::size_t k, double t) {
        UbNode& node = nodes_[k];
        while (node.busy && node.depart_time <= t) {
            const double dep = node.depart_time;
            const double gen = node.serve_gen;
            const std::int64_t id = node.serve_id;
            // Log the departure before the promoted packet's service start:
            // at equal timestamps the free server is the cause.
            log_event(log_, dep, static_cast<int>(k) + 1, id, EventKind::departure);
            if (node.waiting) {
                node.waiting = false;
                start_service(k, dep, node.wait_gen, node.wait_id);
            } else {
                node.busy = false;
            }
            if (k + 1 < nodes_.size()) {
                arrive(k + 1, dep, gen, id);
            } else {
                sink_(dep, gen);
            }
        }
    }

    void flush() {
        for (std::size_t k = 0; k < nodes_.size(); ++k) advance(k, kInf);
    }

  private:
    void start_service(std::size_t k, double t, double generation, std::int64_t id) {
        UbNode& node = nodes_[k];
        const double x = cfg_.hops[k].sample(rng_[k]);
        node.busy = true;
        node.depart_time = t + x;
        node.serve_gen = generation;
        node.serve_id = id;
        log_event(log_, t, static_cast<int>(k) + 1, id, EventKind::service_start);
    }

    const SystemConfig& cfg_;
    Policy policy_;
    Sink sink_;
    EventLog* log_;
    std::vector<UbNode> nodes_;
    std::vector<Rng> rng_;
};

void validate_sim_args(const SystemConfig& cfg, double horizon, double warmup, int batches) {
    if (cfg.hops.empty()) throw std::invalid_argument("simulate: at least one hop required");
    if (!(cfg.rate > 0.0)) throw std::invalid_argument("simulate: rate must be positive");
    if (!(cfg.age_limit > 0.0)) throw std::invalid_argument("simulate: age limit must be positive");
    if (!(warmup >= 0.0) || !(horizon > warmup))
        throw std::invalid_argument("simulate: need horizon > warmup >= 0");
    if (batches < 2) throw std::invalid_argument("simulate: need at least 2 batches");
}

SimEstimate run_fcfs_infinite(const SystemConfig& cfg, double horizon, double warmup,
                              std::uint64_t seed, int batches, EventLog* log) {
    const std::size_t hops = cfg.hop_count();
    std::vector<Rng> rng;
    rng.reserve(hops);
    for (std::size_t k = 0; k < hops; ++k) rng.emplace_back(seed, k);
    std::vector<double> last_depart(hops, -kInf);
    AoiAccumulator acc(cfg.age_limit, warmup, horizon, batches);
    for (std::int64_t n = 0;; ++n) {
        const double gen = static_cast<double>(n) / cfg.rate;
        if (gen >= horizon) break;
        double t = gen;
        for (std::size_t k = 0; k < hops; ++k) {
            const double start = std::max(last_depart[k], t);
            const double x = cfg.hops[k].sample(rng[k]);
            const double dep = start + x;
            log_event(log, t, static_cast<int>(k) + 1, n, EventKind::arrival);
            log_event(log, start, static_cast<int>(k) + 1, n, EventKind::service_start);
            log_event(log, dep, static_cast<int>(k) + 1, n, EventKind::departure);
            last_depart[k] = dep;
            t = dep;
        }
        acc.deliver(t, gen);
    }
    acc.finish();
    SimEstimate est;
    est.violation_prob = acc.fraction();
    est.half_width = acc.half_width();
    est.horizon = horizon;
    est.warmup = warmup;
    est.seed = seed;
    est.policy = Policy::fcfs_infinite;
    return est;
}

SimEstimate run_unit_buffer(const SystemConfig& cfg, Policy policy, double horizon,
                            double warmup, std::uint64_t seed, int batches, EventLog* log) {
    AoiAccumulator acc(cfg.age_limit, warmup, horizon, batches);
    auto sink = [&acc](double t, double gen) { acc.deliver(t, gen); };
    UbTandem<decltype(sink)> tandem(cfg, policy, seed, sink, log);
    for (std::int64_t n = 0;; ++n) {
        const double gen = static_cast<double>(n) / cfg.rate;
        if (gen >= horizon) break;
        tandem.arrive(0, gen, gen, n);
    }
    tandem.flush();
    acc.finish();
    SimEstimate est;
    est.violation_prob = acc.fraction();
    est.half_width = acc.half_width();
    est.horizon = horizon;
    est.warmup = warmup;
    est.seed = seed;
    est.policy = policy;
    return est;
}

bool config_unstable(const SystemConfig& cfg) {
    double bottleneck = kInf;
    for (const auto& hop : cfg.hops) {
        if (hop.kind() == DistKind::deterministic && hop.value() == 0.0) continue;
        bottleneck = std::min(bottleneck, hop.mean_rate());
    }
    return cfg.rate >= bottleneck;
}

// Shared replication driver for the transient estimators.  `one_path` maps a
// replication's per-hop random streams to 0/1 (violation or not).
template <class OnePath>
double replicate(const SystemConfig& cfg, int replications, std::uint64_t seed, int jobs,
                 OnePath one_path) {
    if (replications < 1)
        throw std::invalid_argument("replications must be >= 1");
    const int n_jobs = std::max(1, jobs);
    std::vector<std::int64_t> hits(static_cast<std::size_t>(n_jobs), 0);
    const std::size_t reps = static_cast<std::size_t>(replications);
    const std::size_t chunk = (reps + n_jobs - 1) / n_jobs;
    detail::parallel_for(static_cast<std::size_t>(n_jobs), n_jobs, [&](std::size_t slot) {
        const std::size_t begin = slot * chunk;
        const std::size_t end = std::min(reps, begin + chunk);
        std::int64_t count = 0;
        for (std::size_t r = begin; r < end; ++r) {
            std::vector<Rng> rng;
            rng.reserve(cfg.hop_count());
            const std::uint64_t rep_seed = mix_seed(seed, r);
            for (std::size_t k = 0; k < cfg.hop_count(); ++k) rng.emplace_back(rep_seed, k);
            if (one_path(rng)) ++count;
        }
        hits[slot] = count;
    });
    std::int64_t total = 0;
    for (std::int64_t h : hits) total += h;
    return static_cast<double>(total) / static_cast<double>(replications);
}

}  // namespace

std::string to_string(Policy policy) {
    switch (policy) {
        case Policy::fcfs_infinite: return "fcfs_infinite";
        case Policy::fcfs_unit_buffer: return "fcfs_unit_buffer";
        case Policy::lgfs_unit_buffer: return "lgfs_unit_buffer";
    }
    return "unknown";
}

std::optional<Policy> policy_from_string(std::string_view name) {
    if (name == "fcfs_infinite") return Policy::fcfs_infinite;
    if (name == "fcfs_unit_buffer") return Policy::fcfs_unit_buffer;
    if (name == "lgfs_unit_buffer") return Policy::lgfs_unit_buffer;
    return std::nullopt;
}

void write_event_log(const EventLog& log, std::ostream& os) {
    auto kind_name = [](EventKind kind) {
        switch (kind) {
            case EventKind::arrival: return "arrival";
            case EventKind::service_start: return "service_start";
            case EventKind::departure: return "departure";
            case EventKind::drop: return "drop";
        }
        return "unknown";
    };
    for (const auto& ev : log) {
        os << detail::format_double(ev.time) << ' ' << ev.node << ' ' << ev.packet << ' '
           << kind_name(ev.kind) << '\n';
    }
}

SimEstimate simulate_violation(const SystemConfig& cfg, Policy policy, double horizon,
                               double warmup, std::uint64_t seed, int batches, EventLog* log) {
    validate_sim_args(cfg, horizon, warmup, batches);
    SimEstimate est = policy == Policy::fcfs_infinite
                          ? run_fcfs_infinite(cfg, horizon, warmup, seed, batches, log)
                          : run_unit_buffer(cfg, policy, horizon, warmup, seed, batches, log);
    est.unstable = config_unstable(cfg);
    return est;
}

double transient_violation(const SystemConfig& cfg, double t, int replications,
                           std::uint64_t seed, int jobs) {
    if (cfg.hops.empty()) throw std::invalid_argument("transient_violation: no hops");
    if (!(cfg.rate > 0.0) || !(t > 0.0))
        throw std::invalid_argument("transient_violation: need positive rate and time");
    const double d = cfg.age_limit;
    const std::int64_t n_last = static_cast<std::int64_t>(std::floor(cfg.rate * t));
    return replicate(cfg, replications, seed, jobs, [&](std::vector<Rng>& rng) {
        double freshest = -1.0;  // generation of the freshest delivery by time t
        std::vector<double> last_depart(cfg.hop_count(), -kInf);
        for (std::int64_t n = 0; n <= n_last; ++n) {
            const double gen = static_cast<double>(n) / cfg.rate;
            double dep = gen;
            for (std::size_t k = 0; k < cfg.hop_count(); ++k) {
                dep = std::max(last_depart[k], dep) + cfg.hops[k].sample(rng[k]);
                last_depart[k] = dep;
            }
            if (dep > t) break;  // departures are nondecreasing under FCFS
            freshest = gen;
        }
        const double age = freshest >= 0.0 ? t - freshest : t;
        return age > d;
    });
}

double tagged_departure_violation(const SystemConfig& cfg, double t, int replications,
                                  std::uint64_t seed, int jobs) {
    if (cfg.hops.empty()) throw std::invalid_argument("tagged_departure_violation: no hops");
    if (!(cfg.rate > 0.0) || !(t > 0.0))
        throw std::invalid_argument("tagged_departure_violation: need positive rate and time");
    const double d = cfg.age_limit;
    const std::int64_t tagged =
        std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(cfg.rate * (t - d))));
    return replicate(cfg, replications, seed, jobs, [&](std::vector<Rng>& rng) {
        std::vector<double> last_depart(cfg.hop_count(), -kInf);
        for (std::int64_t n = 0; n <= tagged; ++n) {
            double dep = static_cast<double>(n) / cfg.rate;
            for (std::size_t k = 0; k < cfg.hop_count(); ++k) {
                dep = std::max(last_depart[k], dep) + cfg.hops[k].sample(rng[k]);
                last_depart[k] = dep;
            }
            if (dep > t) return true;  // later departures only come later
        }
        return false;
    });
}

std::vector<SimEstimate> compare_policies(const SystemConfig& cfg,
                                          const std::vector<double>& rate_grid,
                                          double horizon, double warmup, std::uint64_t seed,
                                          int jobs) {
    if (rate_grid.empty()) throw std::invalid_argument("compare_policies: empty rate grid");
    static constexpr Policy kPolicies[] = {Policy::fcfs_infinite, Policy::fcfs_unit_buffer,
                                           Policy::lgfs_unit_buffer};
    std::vector<SimEstimate> rows(rate_grid.size() * 3);
    detail::parallel_for(rows.size(), jobs, [&](std::size_t cell) {
        const std::size_t i = cell / 3;
        const Policy policy = kPolicies[cell % 3];
        SystemConfig point = cfg;
        point.rate = rate_grid[i];
        if (!(point.rate > 0.0))
            throw std::invalid_argument("compare_policies: rates must be positive");
        rows[cell] = simulate_violation(point, policy, horizon, warmup, mix_seed(seed, cell));
    });
    return rows;
}

}  // namespace aoitail
