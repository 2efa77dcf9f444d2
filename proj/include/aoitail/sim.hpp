#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoitail/bounds.hpp"

namespace aoitail {

enum class Policy { fcfs_infinite, fcfs_unit_buffer, lgfs_unit_buffer };

std::string to_string(Policy policy);
std::optional<Policy> policy_from_string(std::string_view name);

struct SimEstimate {
    double violation_prob = 0.0;  // time-average fraction with age > d
    double half_width = 0.0;      // 95% confidence half width (batch means)
    double horizon = 0.0;         // simulated time
    double warmup = 0.0;
    std::uint64_t seed = 0;
    Policy policy = Policy::fcfs_infinite;
    bool unstable = false;  // rate >= bottleneck service rate
};

enum class EventKind { arrival, service_start, departure, drop };

struct SimEvent {
    double time = 0.0;
    int node = 0;  // 1-based hop index
    std::int64_t packet = 0;
    EventKind kind = EventKind::arrival;
};

using EventLog = std::vector<SimEvent>;

// Line-oriented dump: "<time> <node> <packet> <kind>" per event, in causal
// order.  Suitable for replaying the departure recursion offline.
void write_event_log(const EventLog& log, std::ostream& os);

// Time-average violation estimate over [warmup, horizon] from one simulated
// path.  The age reference starts from a virtual fresh packet at t = 0; the
// warmup interval absorbs the transient.  Bit-identical for a fixed
// (cfg, policy, horizon, warmup, seed, batches) regardless of thread count or
// platform.  `log`, when given, captures every event (small horizons only).
SimEstimate simulate_violation(const SystemConfig& cfg, Policy policy, double horizon,
                               double warmup, std::uint64_t seed, int batches = 20,
                               EventLog* log = nullptr);

// P{age at instant t exceeds the age limit} across independent replications
// of the FCFS path started empty at t = 0.
double transient_violation(const SystemConfig& cfg, double t, int replications,
                           std::uint64_t seed, int jobs = 1);

// P{the first packet generated at or after t - d departs after t}, the
// tagged-packet form of the violation probability.
double tagged_departure_violation(const SystemConfig& cfg, double t, int replications,
                                  std::uint64_t seed, int jobs = 1);

// All three policies across a rate grid; rows ordered rate-major,
// policy-minor (fcfs_infinite, fcfs_unit_buffer, lgfs_unit_buffer).  Every
// cell runs over [0, horizon] with warmup discarded and its own seed derived
// from (seed, cell index), so results do not depend on `jobs`.
std::vector<SimEstimate> compare_policies(const SystemConfig& cfg,
                                          const std::vector<double>& rate_grid,
                                          double horizon, double warmup,
                                          std::uint64_t seed, int jobs = 1);

}  // namespace aoitail
