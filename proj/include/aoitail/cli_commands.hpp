#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aoitail/run_config.hpp"

namespace aoitail {

// One output cell: either a number (printed with 17 significant digits) or a
// text marker such as "infeasible".
struct Cell {
    bool is_text = false;
    double num = 0.0;
    std::string text;

    static Cell number(double v) { return Cell{false, v, {}}; }
    static Cell marker(std::string s) { return Cell{true, 0.0, std::move(s)}; }
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// Serializes the table in the config's format: CSV with a leading
// "# key = value" resolved-config block, or a JSON object with "config" and
// "rows" members.  Both are byte-deterministic for a given config.
void write_table(const RunConfig& run, const Table& table, std::ostream& os);

// Subcommand drivers.  Each writes one table to run.output_path (stdout when
// empty) and returns the process exit status: 0 on success, 3 when every
// sweep point is infeasible.  Config errors are reported by throwing
// ConfigError; the caller maps that to exit status 2.
int cmd_bound(const RunConfig& run);
int cmd_optimize(const RunConfig& run);
int cmd_simulate(const RunConfig& run);
int cmd_compare(const RunConfig& run);

}  // namespace aoitail
