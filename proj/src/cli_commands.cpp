#include "aoitail/cli_commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "aoitail/errors.hpp"
#include "aoitail/optimize.hpp"
#include "aoitail/rng.hpp"
#include "aoitail/sim.hpp"
#include "num_text.hpp"
#include "parallel.hpp"

namespace aoitail {

namespace {

std::string fmt(double v) { return detail::format_double(v); }

void write_csv(const RunConfig& run, const Table& table, std::ostream& os) {
    for (const auto& [key, value] : run.to_flat()) os << "# " << key << " = " << value << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) os << ',';
        os << table.columns[c];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) os << ',';
            os << (row[c].is_text ? row[c].text : fmt(row[c].num));
        }
        os << '\n';
    }
}

void write_json(const RunConfig& run, const Table& table, std::ostream& os) {
    nlohmann::ordered_json doc;
    auto& config = doc["config"];
    for (const auto& [key, value] : run.to_flat()) config[key] = value;
    auto& rows = doc["rows"];
    rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (row[c].is_text) {
                obj[table.columns[c]] = row[c].text;
            } else {
                obj[table.columns[c]] = row[c].num;
            }
        }
        rows.push_back(std::move(obj));
    }
    os << doc.dump(2) << '\n';
}

// Writes through to the configured destination; throws ConfigError when the
// output file cannot be created.
void emit(const RunConfig& run, const Table& table) {
    if (run.output_path.empty()) {
        write_table(run, table, std::cout);
        return;
    }
    std::ofstream out(run.output_path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + run.output_path + "'");
    write_table(run, table, out);
}

double cap(const RunConfig& run, double v) {
    return run.cap_at_one ? std::min(v, 1.0) : v;
}

// Resolved per-row simulation window: explicit time overrides win, otherwise
// the horizon covers sim.horizon_periods arrival periods.
std::pair<double, double> sim_window(const RunConfig& run, double rate) {
    const double horizon = run.horizon ? *run.horizon : run.horizon_periods / rate;
    const double warmup = run.warmup ? *run.warmup : run.warmup_fraction * horizon;
    if (!(horizon > warmup))
        throw ConfigError("config: simulation horizon must exceed the warmup");
    return {horizon, warmup};
}

// Shared sweep × policy driver behind cmd_simulate and cmd_compare.  Cells
// get seeds derived from (seed, cell index), so the row content is
// independent of the number of jobs.
int run_sim_table(const RunConfig& run, const std::vector<Policy>& policies) {
    const auto points = run.sweep_points();
    const std::size_t n_cells = points.size() * policies.size();
    std::vector<SimEstimate> cells(n_cells);
    detail::parallel_for(n_cells, run.jobs, [&](std::size_t cell) {
        const auto& point = points[cell / policies.size()];
        const Policy policy = policies[cell % policies.size()];
        SystemConfig cfg{run.hops, point.rate, point.age_limit};
        const auto [horizon, warmup] = sim_window(run, point.rate);
        cells[cell] =
            simulate_violation(cfg, policy, horizon, warmup, mix_seed(run.seed, cell));
    });
    Table table;
    table.columns = {"sweep_value", "policy",  "violation_prob", "half_width",
                     "horizon",     "warmup",  "seed",           "unstable"};
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const auto& point = points[cell / policies.size()];
        const auto& est = cells[cell];
        table.rows.push_back({Cell::number(point.value), Cell::marker(to_string(est.policy)),
                              Cell::number(est.violation_prob), Cell::number(est.half_width),
                              Cell::number(est.horizon), Cell::number(est.warmup),
                              Cell::marker(std::to_string(est.seed)),
                              Cell::number(est.unstable ? 1.0 : 0.0)});
    }
    emit(run, table);
    return 0;
}

}  // namespace

void write_table(const RunConfig& run, const Table& table, std::ostream& os) {
    if (run.format == "json") {
        write_json(run, table, os);
    } else {
        write_csv(run, table, os);
    }
}

int cmd_bound(const RunConfig& run) {
    const auto points = run.sweep_points();
    Table table;
    table.columns = {"sweep_value", "chernoff",        "alpha_relaxed",
                     "alpha",       "s_star_chernoff", "s_star_alpha"};
    bool any_feasible = false;
    for (const auto& point : points) {
        SystemConfig cfg{run.hops, point.rate, point.age_limit};
        std::vector<Cell> row{Cell::number(point.value)};
        bool feasible = cfg.feasible();
        if (feasible) {
            try {
                const BoundResult chernoff = minimize_psi_over_s(cfg);
                row.push_back(Cell::number(cap(run, chernoff.value)));
                if (cfg.hop_count() <= 2) {
                    const BoundResult alpha =
                        cfg.hop_count() == 1 ? alpha_relaxed_single(cfg, run.bound_terms)
                                             : alpha_relaxed_two(cfg, run.bound_terms);
                    row.push_back(Cell::number(cap(run, alpha.value)));
                    row.push_back(alpha.alpha ? Cell::number(*alpha.alpha)
                                              : Cell::marker("n/a"));
                    row.push_back(Cell::number(chernoff.s_star));
                    row.push_back(Cell::number(alpha.s_star));
                } else {
                    row.push_back(Cell::marker("unsupported"));
                    row.push_back(Cell::marker("unsupported"));
                    row.push_back(Cell::number(chernoff.s_star));
                    row.push_back(Cell::marker("unsupported"));
                }
            } catch (const InfeasibleError&) {
                feasible = false;
                row.resize(1);
            }
        }
        if (!feasible) {
            for (std::size_t c = 1; c < table.columns.size(); ++c)
                row.push_back(Cell::marker("infeasible"));
        } else {
            any_feasible = true;
        }
        table.rows.push_back(std::move(row));
    }
    emit(run, table);
    return any_feasible ? 0 : 3;
}

int cmd_optimize(const RunConfig& run) {
    Table table;
    table.columns = {"method", "rate", "objective", "s_star", "utilization", "grid_step"};
    double bottleneck = std::numeric_limits<double>::infinity();
    for (const auto& hop : run.hops) {
        if (hop.kind() == DistKind::deterministic && hop.value() == 0.0) continue;
        bottleneck = std::min(bottleneck, hop.mean_rate());
    }
    std::optional<std::pair<double, double>> rate_bounds;
    if (run.opt_rate_min || run.opt_rate_max) {
        rate_bounds = {run.opt_rate_min.value_or(std::numeric_limits<double>::min()),
                       run.opt_rate_max.value_or(std::numeric_limits<double>::infinity())};
    }
    try {
        const RateSolution chernoff =
            solve_chernoff_ubmp(run.hops, run.age_limit, rate_bounds);
        const RateSolution alpha =
            solve_alpha_ubmp(run.hops, run.age_limit, run.bound_terms, run.opt_grid_step);
        for (const RateSolution& sol : {chernoff, alpha}) {
            table.rows.push_back(
                {Cell::marker(sol.method == SolveMethod::chernoff_ubmp ? "chernoff_ubmp"
                                                                       : "alpha_ubmp"),
                 Cell::number(sol.rate), Cell::number(cap(run, sol.objective)),
                 Cell::number(sol.s_star), Cell::number(sol.rate / bottleneck),
                 Cell::number(sol.grid_step)});
        }
    } catch (const InfeasibleError&) {
        emit(run, table);
        return 3;
    }
    emit(run, table);
    return 0;
}

int cmd_simulate(const RunConfig& run) { return run_sim_table(run, run.policies); }

int cmd_compare(const RunConfig& run) {
    return run_sim_table(run, {Policy::fcfs_infinite, Policy::fcfs_unit_buffer,
                               Policy::lgfs_unit_buffer});
}

}  // namespace aoitail
