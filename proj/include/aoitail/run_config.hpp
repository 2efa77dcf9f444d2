#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoitail/bounds.hpp"
#include "aoitail/dist.hpp"
#include "aoitail/sim.hpp"

namespace aoitail {

// Sweep over one scalar; values are min, min+step, ..., up to max.
struct SweepSpec {
    std::string variable = "rate";  // "rate" | "age_limit" | "none"
    std::optional<double> min;
    std::optional<double> max;
    std::optional<double> step;

    bool operator==(const SweepSpec&) const = default;
};

// Full description of one CLI run: system, sweep, bound, simulation, solver
// and output options.  Parsed from a flat key = value text file plus
// command-line overrides; resolve() fills the defaults that depend on other
// fields (sweep ranges).  A resolved config serializes to a flat block that
// parses back to an equal RunConfig.
struct RunConfig {
    std::vector<ServiceDistribution> hops;  // keys hop1..hopN
    double rate = 0.5;
    double age_limit = 10.0;

    SweepSpec sweep;

    int bound_terms = 30;      // union-bound terms kept exactly (K)
    bool cap_at_one = false;   // presentation-only clamp of bound columns

    double horizon_periods = 1e7;    // horizon as a multiple of 1/rate
    std::optional<double> horizon;   // absolute-time override
    double warmup_fraction = 0.05;   // fraction of the horizon discarded
    std::optional<double> warmup;    // absolute-time override
    std::uint64_t seed = 1;
    int replications = 100000;
    std::vector<Policy> policies = {Policy::fcfs_infinite};

    std::string output_path;     // empty = stdout
    std::string format = "csv";  // "csv" | "json"
    int jobs = 1;

    std::optional<double> opt_rate_min;  // optional solver bracket override
    std::optional<double> opt_rate_max;
    double opt_grid_step = 0.025;  // rate resolution of the grid solver

    static RunConfig defaults();

    // Applies one key = value assignment; throws ConfigError on unknown keys
    // or malformed values.
    void set(const std::string& key, const std::string& value);

    // Fills sweep bounds that were left unset; validates invariants
    // (min < max, step > 0, positive system parameters).
    void resolve();

    SystemConfig system() const;

    // The whole config as ordered key/value pairs; parsing them back yields
    // an equal RunConfig.  Execution plumbing (output.path, jobs) is omitted
    // so identical runs emit identical bytes regardless of destination or
    // thread count.
    std::vector<std::pair<std::string, std::string>> to_flat() const;

    // One row per sweep value; `value` is the swept coordinate and
    // rate/age_limit are fully resolved for that row.  A "none" sweep yields
    // the single configured point with value = rate.
    struct SweepPoint {
        double value;
        double rate;
        double age_limit;
    };
    std::vector<SweepPoint> sweep_points() const;

    // Equality over the semantic fields; output.path and jobs do not affect
    // what a run computes, so they are ignored.
    bool operator==(const RunConfig& other) const;
};

// Parses key = value lines ('#' starts a comment, blank lines ignored) on
// top of the defaults.  Throws ConfigError on any malformed line.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Re-reads the resolved-config block ("# key = value" comment lines) that
// the CSV writer places at the top of its output.
RunConfig parse_embedded_config(const std::string& csv_text);

}  // namespace aoitail
