#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoitail/cli_commands.hpp"
#include "aoitail/errors.hpp"
#include "aoitail/optimize.hpp"
#include "aoitail/run_config.hpp"
#include "cli_path.hpp"

using namespace aoitail;

namespace {

const std::filesystem::path& scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("aoitail_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string path_in_scratch(const std::string& name) {
    return (scratch_dir() / name).string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args) {
    static int invocation = 0;
    const std::string out_path = path_in_scratch("stdout_" + std::to_string(invocation));
    const std::string err_path = path_in_scratch("stderr_" + std::to_string(invocation));
    ++invocation;
    const std::string cmd = std::string("\"") + AOITAIL_CLI_PATH + "\" " + args + " > " +
                            out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = read_file(out_path);
    res.err = read_file(err_path);
    return res;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string config_block;  // the leading "# ..." lines, verbatim
};

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0) {
            csv.config_block += line + "\n";
        } else if (!header_seen) {
            csv.header = split(line, ',');
            header_seen = true;
        } else if (!line.empty()) {
            csv.rows.push_back(split(line, ','));
        }
    }
    return csv;
}

std::size_t column(const Csv& csv, const std::string& name) {
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
        if (csv.header[c] == name) return c;
    }
    REQUIRE_MESSAGE(false, "missing column " << name);
    return 0;
}

double num(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

}  // namespace

TEST_CASE("run description: defaults, single assignments, and hop staging") {
    RunConfig cfg = RunConfig::defaults();
    REQUIRE(cfg.hops.size() == 2);
    CHECK(cfg.hops[0].describe() == "geometric(p=0.85,slot=1)");
    CHECK(cfg.hops[1].describe() == "geometric(p=0.9,slot=1)");
    CHECK(cfg.rate == 0.5);
    CHECK(cfg.age_limit == 10.0);
    CHECK(cfg.bound_terms == 30);
    CHECK(cfg.sweep.variable == "rate");
    CHECK(cfg.format == "csv");
    CHECK(cfg.jobs == 1);
    CHECK(cfg.policies == std::vector<Policy>{Policy::fcfs_infinite});

    cfg.set("rate", "0.7");
    CHECK(cfg.rate == 0.7);
    cfg.set("hop1", "exponential(mu=2)");
    CHECK(cfg.hops[0].describe() == "exponential(mu=2)");
    CHECK(cfg.hops.size() == 2);
    cfg.set("hop3", "erlang(b=2,lambda=4)");  // appending one past the end is fine
    CHECK(cfg.hops.size() == 3);
    CHECK_THROWS_AS(cfg.set("hop5", "exponential(mu=1)"), ConfigError);
    cfg.set("hops", "1");
    CHECK(cfg.hops.size() == 1);
    cfg.set("sim.policies", "fcfs_unit_buffer,lgfs_unit_buffer");
    CHECK(cfg.policies ==
          std::vector<Policy>{Policy::fcfs_unit_buffer, Policy::lgfs_unit_buffer});

    CHECK_THROWS_AS(cfg.set("no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(cfg.set("rate", "fast"), ConfigError);
    CHECK_THROWS_AS(cfg.set("rate", "-1"), ConfigError);
    CHECK_THROWS_AS(cfg.set("hop1", "normal(0,1)"), ConfigError);
    CHECK_THROWS_AS(cfg.set("output.format", "yaml"), ConfigError);
    CHECK_THROWS_AS(cfg.set("sweep.variable", "bogus"), ConfigError);
    CHECK_THROWS_AS(cfg.set("sim.policies", "fcfs"), ConfigError);
    CHECK_THROWS_AS(cfg.set("sim.seed", "-3"), ConfigError);
}

TEST_CASE("run description: file parsing replaces the default system wholesale") {
    const RunConfig cfg = parse_config_text(
        "# a comment line\n"
        "hop1 = exponential(mu=1)   # trailing comment\n"
        "rate = 0.4\n"
        "\n"
        "age_limit = 5\n");
    REQUIRE(cfg.hops.size() == 1);  // the two default hops are gone
    CHECK(cfg.hops[0].describe() == "exponential(mu=1)");
    CHECK(cfg.rate == 0.4);
    CHECK(cfg.age_limit == 5.0);

    CHECK_THROWS_AS(parse_config_text("rate 0.4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("hop2 = exponential(mu=1)\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_file(path_in_scratch("missing.cfg")), ConfigError);
}

TEST_CASE("run description: sweep defaults, points, and validation") {
    RunConfig cfg = RunConfig::defaults();  // bottleneck is the 0.85 hop
    cfg.resolve();
    CHECK(cfg.sweep.variable == "rate");
    CHECK(*cfg.sweep.min == 0.2);
    CHECK(*cfg.sweep.max == doctest::Approx(0.75 * 0.85).epsilon(1e-15));
    CHECK(*cfg.sweep.step == 0.025);

    RunConfig age = RunConfig::defaults();
    age.set("sweep.variable", "age_limit");
    age.resolve();
    CHECK(*age.sweep.min == 5.0);
    CHECK(*age.sweep.max == 15.0);
    CHECK(*age.sweep.step == 1.25);
    const auto age_points = age.sweep_points();
    REQUIRE(age_points.size() == 9);
    for (const auto& p : age_points) CHECK(p.rate == age.rate);
    CHECK(age_points.front().age_limit == 5.0);
    CHECK(age_points.back().age_limit == 15.0);

    RunConfig none = RunConfig::defaults();
    none.set("sweep.variable", "none");
    none.set("rate", "0.3");
    none.resolve();
    const auto single = none.sweep_points();
    REQUIRE(single.size() == 1);
    CHECK(single[0].value == 0.3);
    CHECK(single[0].rate == 0.3);
    CHECK(single[0].age_limit == none.age_limit);

    RunConfig bad = RunConfig::defaults();
    bad.set("sweep.min", "0.5");
    bad.set("sweep.max", "0.25");
    CHECK_THROWS_AS(bad.resolve(), ConfigError);
    RunConfig bad_step = RunConfig::defaults();
    bad_step.set("sweep.step", "0");
    CHECK_THROWS_AS(bad_step.resolve(), ConfigError);
}

TEST_CASE("run description: serialized form round-trips and omits plumbing") {
    RunConfig cfg = parse_config_text(
        "hops = 1\n"
        "hop1 = exponential(mu=1)\n"
        "rate = 0.4\n"
        "sweep.variable = none\n"
        "sim.seed = 9\n"
        "output.format = json\n"
        "bound.cap_at_one = true\n");
    cfg.resolve();
    cfg.output_path = "somewhere.json";
    cfg.jobs = 8;

    std::string text;
    for (const auto& [key, value] : cfg.to_flat()) {
        CHECK(key != "output.path");
        CHECK(key != "jobs");
        text += key + " = " + value + "\n";
    }
    RunConfig back = parse_config_text(text);
    back.resolve();
    CHECK(back == cfg);  // plumbing fields are not part of run identity
    CHECK(back.output_path.empty());
    CHECK(back.jobs == 1);
}

TEST_CASE("bound command: sweep shape and a monotone age sweep") {
    const std::string out = path_in_scratch("bound_rate.csv");
    const CliResult rate_sweep = run_cli(
        "bound --set hops=1 \"--set=hop1=exponential(mu=1)\" --set sweep.min=0.25 "
        "--set sweep.max=0.5 --set sweep.step=0.05 --output " + out);
    CHECK(rate_sweep.code == 0);
    const Csv csv = parse_csv(read_file(out));
    CHECK(csv.header == std::vector<std::string>{"sweep_value", "chernoff", "alpha_relaxed",
                                                 "alpha", "s_star_chernoff", "s_star_alpha"});
    REQUIRE(csv.rows.size() == 6);  // 0.25, 0.30, ..., 0.50
    CHECK(num(csv.rows.front()[0]) == 0.25);
    CHECK(num(csv.rows.back()[0]) == doctest::Approx(0.5).epsilon(1e-12));
    for (const auto& row : csv.rows) {
        const double chernoff = num(row[column(csv, "chernoff")]);
        const double relaxed = num(row[column(csv, "alpha_relaxed")]);
        CHECK(chernoff > 0.0);
        CHECK(relaxed <= chernoff * (1.0 + 1e-12));
    }

    const CliResult age_sweep = run_cli(
        "bound --set hops=1 \"--set=hop1=exponential(mu=1)\" --set rate=0.5 "
        "--set sweep.variable=age_limit --set sweep.min=5 --set sweep.max=15 "
        "--set sweep.step=2.5");
    CHECK(age_sweep.code == 0);
    const Csv ages = parse_csv(age_sweep.out);
    REQUIRE(ages.rows.size() == 5);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& row : ages.rows) {
        const double chernoff = num(row[column(ages, "chernoff")]);
        CHECK(chernoff < prev);  // a looser deadline can only help
        prev = chernoff;
    }
}

TEST_CASE("bound command: the embedded config reproduces the run byte for byte") {
    const std::string first = path_in_scratch("embed_first.csv");
    const CliResult run1 = run_cli(
        "bound --set hops=2 \"--set=hop1=exponential(mu=1)\" "
        "\"--set=hop2=erlang(b=3,lambda=3)\" --set sweep.min=0.3 --set sweep.max=0.45 "
        "--set sweep.step=0.05 --set age_limit=8 --output " + first);
    REQUIRE(run1.code == 0);
    const std::string text = read_file(first);

    // The leading comment block is itself a complete config file.
    std::string cfg_text;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) cfg_text += line.substr(2) + "\n";
    }
    const std::string cfg_path = path_in_scratch("embed.cfg");
    write_file(cfg_path, cfg_text);
    const std::string second = path_in_scratch("embed_second.csv");
    const CliResult run2 = run_cli("bound --config " + cfg_path + " --output " + second);
    REQUIRE(run2.code == 0);
    CHECK(read_file(second) == text);

    // And the parser agrees with the round trip.
    RunConfig embedded = parse_embedded_config(text);
    RunConfig from_file = parse_config_file(cfg_path);
    from_file.resolve();
    CHECK(embedded == from_file);
}

TEST_CASE("optimize command: both solvers reported with exact library agreement") {
    const CliResult res = run_cli(
        "optimize --set hops=1 \"--set=hop1=exponential(mu=1)\" --set age_limit=5");
    CHECK(res.code == 0);
    const Csv csv = parse_csv(res.out);
    CHECK(csv.header == std::vector<std::string>{"method", "rate", "objective", "s_star",
                                                 "utilization", "grid_step"});
    REQUIRE(csv.rows.size() == 2);
    CHECK(csv.rows[0][0] == "chernoff_ubmp");
    CHECK(csv.rows[1][0] == "alpha_ubmp");
    // With a unit-rate service the utilization column repeats the rate.
    CHECK(csv.rows[0][column(csv, "utilization")] == csv.rows[0][column(csv, "rate")]);

    const std::vector<ServiceDistribution> hops{ServiceDistribution::exponential(1.0)};
    const RateSolution chernoff = solve_chernoff_ubmp(hops, 5.0);
    const RateSolution alpha = solve_alpha_ubmp(hops, 5.0);
    CHECK(num(csv.rows[0][1]) == chernoff.rate);  // %.17g round-trips doubles
    CHECK(num(csv.rows[0][2]) == chernoff.objective);
    CHECK(num(csv.rows[1][1]) == alpha.rate);
    CHECK(num(csv.rows[1][2]) == alpha.objective);
    CHECK(num(csv.rows[1][column(csv, "grid_step")]) == 0.025);
    CHECK(num(csv.rows[1][1]) == doctest::Approx(0.425).epsilon(1e-12));

    // Two-hop: the two recommended rates sit within two grid steps.
    const CliResult two = run_cli(
        "optimize --set hops=2 \"--set=hop1=exponential(mu=1)\" "
        "\"--set=hop2=exponential(mu=1)\" --set age_limit=10");
    CHECK(two.code == 0);
    const Csv twocsv = parse_csv(two.out);
    REQUIRE(twocsv.rows.size() == 2);
    const double r_chernoff = num(twocsv.rows[0][1]);
    const double r_alpha = num(twocsv.rows[1][1]);
    CHECK(std::abs(r_chernoff - r_alpha) <= 2.0 * 0.025 + 1e-12);
}

TEST_CASE("simulate command: identical bytes across reruns and job counts") {
    const std::string base =
        "simulate --set hops=1 \"--set=hop1=exponential(mu=1)\" --set sweep.min=0.3 "
        "--set sweep.max=0.5 --set sweep.step=0.1 --set sim.horizon_periods=20000 "
        "--set sim.seed=3";
    const std::string f1 = path_in_scratch("sim1.csv");
    const std::string f2 = path_in_scratch("sim2.csv");
    const std::string f8 = path_in_scratch("sim8.csv");
    CHECK(run_cli(base + " --jobs 1 --output " + f1).code == 0);
    CHECK(run_cli(base + " --jobs 1 --output " + f2).code == 0);
    CHECK(run_cli(base + " --jobs 8 --output " + f8).code == 0);
    const std::string bytes = read_file(f1);
    CHECK(bytes == read_file(f2));
    CHECK(bytes == read_file(f8));

    // Output to stdout is the same stream of bytes.
    const CliResult to_stdout = run_cli(base);
    CHECK(to_stdout.out == bytes);

    // A different seed changes the estimates.
    const CliResult other = run_cli(base + " --seed 4");
    const Csv a = parse_csv(bytes);
    const Csv b = parse_csv(other.out);
    REQUIRE(a.rows.size() == 3);
    REQUIRE(b.rows.size() == 3);
    bool any_differ = false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i][column(a, "violation_prob")] != b.rows[i][column(b, "violation_prob")])
            any_differ = true;
    }
    CHECK(any_differ);
}

TEST_CASE("simulate and compare commands: policy layout") {
    const std::string common =
        " --set hops=1 \"--set=hop1=exponential(mu=1)\" --set sweep.min=0.3 "
        "--set sweep.max=0.4 --set sweep.step=0.1 --set sim.horizon_periods=5000";
    const CliResult sim = run_cli(
        "simulate --set sim.policies=fcfs_unit_buffer,lgfs_unit_buffer" + common);
    CHECK(sim.code == 0);
    const Csv simcsv = parse_csv(sim.out);
    REQUIRE(simcsv.rows.size() == 4);  // 2 sweep points x 2 policies
    const std::size_t pol = column(simcsv, "policy");
    CHECK(simcsv.rows[0][pol] == "fcfs_unit_buffer");
    CHECK(simcsv.rows[1][pol] == "lgfs_unit_buffer");
    CHECK(simcsv.rows[2][pol] == "fcfs_unit_buffer");
    CHECK(simcsv.rows[3][pol] == "lgfs_unit_buffer");
    CHECK(num(simcsv.rows[0][0]) == num(simcsv.rows[1][0]));

    const CliResult cmp = run_cli("compare" + common);
    CHECK(cmp.code == 0);
    const Csv cmpcsv = parse_csv(cmp.out);
    REQUIRE(cmpcsv.rows.size() == 6);  // 2 sweep points x all 3 policies
    const std::size_t cpol = column(cmpcsv, "policy");
    for (std::size_t i = 0; i < 6; i += 3) {
        CHECK(cmpcsv.rows[i][cpol] == "fcfs_infinite");
        CHECK(cmpcsv.rows[i + 1][cpol] == "fcfs_unit_buffer");
        CHECK(cmpcsv.rows[i + 2][cpol] == "lgfs_unit_buffer");
    }
    for (const auto& row : cmpcsv.rows) {
        const double p = num(row[column(cmpcsv, "violation_prob")]);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("json output parses and mirrors the csv content") {
    const CliResult res = run_cli(
        "bound --format json --set hops=1 \"--set=hop1=exponential(mu=1)\" "
        "--set sweep.variable=none --set rate=0.5");
    CHECK(res.code == 0);
    const auto doc = nlohmann::json::parse(res.out);
    REQUIRE(doc.contains("config"));
    REQUIRE(doc.contains("rows"));
    CHECK(doc["config"].is_object());
    CHECK(doc["config"]["rate"] == "0.5");
    CHECK_FALSE(doc["config"].contains("output.path"));
    CHECK_FALSE(doc["config"].contains("jobs"));
    REQUIRE(doc["rows"].size() == 1);
    const auto& row = doc["rows"][0];
    CHECK(row["sweep_value"].get<double>() == 0.5);
    CHECK(row["chernoff"].is_number());
    const SystemConfig cfg{{ServiceDistribution::exponential(1.0)}, 0.5, 10.0};
    CHECK(row["chernoff"].get<double>() ==
          doctest::Approx(minimize_psi_over_s(cfg).value).epsilon(1e-14));
}

TEST_CASE("exit statuses: configuration errors and infeasible problems") {
    CHECK(run_cli("bound --set no_such_key=1").code == 2);
    CHECK(run_cli("bound --set rate").code == 2);                  // not key=value
    CHECK(run_cli("bound --config " + path_in_scratch("absent.cfg")).code == 2);
    CHECK(run_cli("simulate --set sim.policies=bogus").code == 2);
    CHECK(run_cli("bound --format yaml").code == 2);               // rejected flag value
    CHECK(run_cli("frobnicate").code == 2);                        // unknown subcommand
    CHECK(run_cli("").code == 2);                                  // a subcommand is required
    CHECK(run_cli("--help").code == 0);

    // Age limit below the feasible range: every sweep row is infeasible.
    const CliResult infeasible_bound = run_cli(
        "bound --set hops=1 \"--set=hop1=geometric(p=0.85)\" --set sweep.min=0.9 "
        "--set sweep.max=1.0 --set sweep.step=0.05");
    CHECK(infeasible_bound.code == 3);
    const Csv csv = parse_csv(infeasible_bound.out);
    REQUIRE(csv.rows.size() == 3);
    for (const auto& row : csv.rows) CHECK(row[column(csv, "chernoff")] == "infeasible");

    CHECK(run_cli("optimize --set hops=1 \"--set=hop1=exponential(mu=1)\" "
                  "--set age_limit=0.8").code == 3);
}
