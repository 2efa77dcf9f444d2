#include "aoitail/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "aoitail/errors.hpp"
#include "num_text.hpp"

namespace aoitail {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string fmt(double v) { return detail::format_double(v); }

double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    return x;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || v[0] == '-')
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" +
                          value + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<Policy> parse_policies(const std::string& key, const std::string& value) {
    std::vector<Policy> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string name = trim(item);
        if (name.empty()) continue;
        const auto policy = policy_from_string(name);
        if (!policy)
            throw ConfigError("config key '" + key + "': unknown policy '" + name + "'");
        out.push_back(*policy);
    }
    if (out.empty())
        throw ConfigError("config key '" + key + "': expected at least one policy");
    return out;
}

std::string join_policies(const std::vector<Policy>& policies) {
    std::string out;
    for (std::size_t i = 0; i < policies.size(); ++i) {
        if (i > 0) out += ',';
        out += to_string(policies[i]);
    }
    return out;
}

// hopN keys may arrive in any order; stage them and splice into the hop list
// once, validating that indices are contiguous from 1.
struct HopStage {
    std::vector<std::pair<int, ServiceDistribution>> entries;

    void add(int index, ServiceDistribution dist) {
        for (auto& e : entries) {
            if (e.first == index) {
                e.second = std::move(dist);
                return;
            }
        }
        entries.emplace_back(index, std::move(dist));
    }

    std::vector<ServiceDistribution> finish() {
        std::vector<ServiceDistribution> hops;
        if (entries.empty()) return hops;
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].first != static_cast<int>(i) + 1)
                throw ConfigError("hop keys must be contiguous starting at hop1; missing hop" +
                                  std::to_string(i + 1));
            hops.push_back(std::move(entries[i].second));
        }
        return hops;
    }
};

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig run;
    run.hops = {ServiceDistribution::geometric(0.85), ServiceDistribution::geometric(0.9)};
    return run;
}

void RunConfig::set(const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    if (key.rfind("hop", 0) == 0 && key.size() > 3 &&
        std::isdigit(static_cast<unsigned char>(key[3]))) {
        const std::int64_t index = parse_int(key, key.substr(3));
        if (index < 1 || index > 64)
            throw ConfigError("config key '" + key + "': hop index out of range");
        ServiceDistribution dist = [&] {
            try {
                return ServiceDistribution::parse(trim(value));
            } catch (const std::exception& e) {
                throw ConfigError("config key '" + key + "': " + e.what());
            }
        }();
        if (static_cast<std::size_t>(index) > hops.size()) {
            if (static_cast<std::size_t>(index) != hops.size() + 1)
                throw ConfigError("config key '" + key + "': hop indices must stay contiguous");
            hops.push_back(std::move(dist));
        } else {
            hops[static_cast<std::size_t>(index) - 1] = std::move(dist);
        }
        return;
    }
    if (key == "hops") {
        // Resets the hop list so a config file can shrink the default system.
        const std::int64_t n = parse_int(key, value);
        if (n < 1 || n > 64) throw ConfigError("config key 'hops': count out of range");
        hops.resize(static_cast<std::size_t>(n), ServiceDistribution::exponential(1.0));
        return;
    }
    if (key == "rate") {
        rate = parse_double(key, value);
        if (!(rate > 0.0)) throw ConfigError("config key 'rate': must be positive");
        return;
    }
    if (key == "age_limit") {
        age_limit = parse_double(key, value);
        if (!(age_limit > 0.0)) throw ConfigError("config key 'age_limit': must be positive");
        return;
    }
    if (key == "sweep.variable") {
        const std::string v = trim(value);
        if (v != "rate" && v != "age_limit" && v != "none")
            throw ConfigError("config key 'sweep.variable': expected rate|age_limit|none");
        sweep.variable = v;
        return;
    }
    if (key == "sweep.min") { sweep.min = parse_double(key, value); return; }
    if (key == "sweep.max") { sweep.max = parse_double(key, value); return; }
    if (key == "sweep.step") { sweep.step = parse_double(key, value); return; }
    if (key == "bound.terms") {
        const std::int64_t v = parse_int(key, value);
        if (v < 1) throw ConfigError("config key 'bound.terms': must be >= 1");
        bound_terms = static_cast<int>(v);
        return;
    }
    if (key == "bound.cap_at_one") { cap_at_one = parse_bool(key, value); return; }
    if (key == "sim.horizon_periods") {
        horizon_periods = parse_double(key, value);
        if (!(horizon_periods > 0.0))
            throw ConfigError("config key 'sim.horizon_periods': must be positive");
        return;
    }
    if (key == "sim.horizon") { horizon = parse_double(key, value); return; }
    if (key == "sim.warmup_fraction") {
        warmup_fraction = parse_double(key, value);
        if (!(warmup_fraction >= 0.0) || !(warmup_fraction < 1.0))
            throw ConfigError("config key 'sim.warmup_fraction': must be in [0, 1)");
        return;
    }
    if (key == "sim.warmup") { warmup = parse_double(key, value); return; }
    if (key == "sim.seed") { seed = parse_u64(key, value); return; }
    if (key == "sim.replications") {
        const std::int64_t v = parse_int(key, value);
        if (v < 1) throw ConfigError("config key 'sim.replications': must be >= 1");
        replications = static_cast<int>(v);
        return;
    }
    if (key == "sim.policies") { policies = parse_policies(key, value); return; }
    if (key == "output.path") { output_path = trim(value); return; }
    if (key == "output.format") {
        const std::string v = trim(value);
        if (v != "csv" && v != "json")
            throw ConfigError("config key 'output.format': expected csv|json");
        format = v;
        return;
    }
    if (key == "jobs") {
        const std::int64_t v = parse_int(key, value);
        if (v < 1) throw ConfigError("config key 'jobs': must be >= 1");
        jobs = static_cast<int>(v);
        return;
    }
    if (key == "optimize.rate_min") { opt_rate_min = parse_double(key, value); return; }
    if (key == "optimize.rate_max") { opt_rate_max = parse_double(key, value); return; }
    if (key == "optimize.grid_step") {
        opt_grid_step = parse_double(key, value);
        if (!(opt_grid_step > 0.0))
            throw ConfigError("config key 'optimize.grid_step': must be positive");
        return;
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::resolve() {
    if (hops.empty()) throw ConfigError("config: at least one hop is required");
    if (!(rate > 0.0)) throw ConfigError("config: rate must be positive");
    if (!(age_limit > 0.0)) throw ConfigError("config: age_limit must be positive");
    if (sweep.variable == "rate") {
        double bottleneck = std::numeric_limits<double>::infinity();
        for (const auto& hop : hops) {
            if (hop.kind() == DistKind::deterministic && hop.value() == 0.0) continue;
            bottleneck = std::min(bottleneck, hop.mean_rate());
        }
        if (!sweep.min) sweep.min = 0.2;
        if (!sweep.max)
            sweep.max = std::isfinite(bottleneck) ? 0.75 * bottleneck : 0.75;
        if (!sweep.step) sweep.step = 0.025;
    } else if (sweep.variable == "age_limit") {
        if (!sweep.min) sweep.min = 5.0;
        if (!sweep.max) sweep.max = 15.0;
        if (!sweep.step) sweep.step = 1.25;
    }
    if (sweep.variable != "none") {
        if (!(*sweep.min < *sweep.max))
            throw ConfigError("config: sweep.min must be below sweep.max");
        if (!(*sweep.step > 0.0)) throw ConfigError("config: sweep.step must be positive");
    }
}

SystemConfig RunConfig::system() const { return SystemConfig{hops, rate, age_limit}; }

std::vector<std::pair<std::string, std::string>> RunConfig::to_flat() const {
    std::vector<std::pair<std::string, std::string>> kv;
    for (std::size_t i = 0; i < hops.size(); ++i)
        kv.emplace_back("hop" + std::to_string(i + 1), hops[i].describe());
    kv.emplace_back("rate", fmt(rate));
    kv.emplace_back("age_limit", fmt(age_limit));
    kv.emplace_back("sweep.variable", sweep.variable);
    if (sweep.min) kv.emplace_back("sweep.min", fmt(*sweep.min));
    if (sweep.max) kv.emplace_back("sweep.max", fmt(*sweep.max));
    if (sweep.step) kv.emplace_back("sweep.step", fmt(*sweep.step));
    kv.emplace_back("bound.terms", std::to_string(bound_terms));
    kv.emplace_back("bound.cap_at_one", cap_at_one ? "true" : "false");
    kv.emplace_back("sim.horizon_periods", fmt(horizon_periods));
    if (horizon) kv.emplace_back("sim.horizon", fmt(*horizon));
    kv.emplace_back("sim.warmup_fraction", fmt(warmup_fraction));
    if (warmup) kv.emplace_back("sim.warmup", fmt(*warmup));
    kv.emplace_back("sim.seed", std::to_string(seed));
    kv.emplace_back("sim.replications", std::to_string(replications));
    kv.emplace_back("sim.policies", join_policies(policies));
    kv.emplace_back("output.format", format);
    kv.emplace_back("optimize.grid_step", fmt(opt_grid_step));
    if (opt_rate_min) kv.emplace_back("optimize.rate_min", fmt(*opt_rate_min));
    if (opt_rate_max) kv.emplace_back("optimize.rate_max", fmt(*opt_rate_max));
    return kv;
}

bool RunConfig::operator==(const RunConfig& other) const {
    return hops == other.hops && rate == other.rate && age_limit == other.age_limit &&
           sweep == other.sweep && bound_terms == other.bound_terms &&
           cap_at_one == other.cap_at_one && horizon_periods == other.horizon_periods &&
           horizon == other.horizon && warmup_fraction == other.warmup_fraction &&
           warmup == other.warmup && seed == other.seed &&
           replications == other.replications && policies == other.policies &&
           format == other.format && opt_rate_min == other.opt_rate_min &&
           opt_rate_max == other.opt_rate_max && opt_grid_step == other.opt_grid_step;
}

std::vector<RunConfig::SweepPoint> RunConfig::sweep_points() const {
    if (sweep.variable == "none") return {SweepPoint{rate, rate, age_limit}};
    if (!sweep.min || !sweep.max || !sweep.step)
        throw ConfigError("config: sweep range is unresolved");
    const double lo = *sweep.min;
    const double hi = *sweep.max;
    const double step = *sweep.step;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<SweepPoint> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (sweep.variable == "rate") {
            points.push_back(SweepPoint{v, v, age_limit});
        } else {
            points.push_back(SweepPoint{v, rate, v});
        }
    }
    return points;
}

namespace {

void apply_lines(RunConfig& run, std::istream& in, const char* where) {
    std::string line;
    int line_no = 0;
    HopStage stage;
    bool saw_hop = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(std::string(where) + ":" + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.rfind("hop", 0) == 0 && key.size() > 3 &&
            std::isdigit(static_cast<unsigned char>(key[3]))) {
            // Hop keys replace the default system wholesale rather than
            // patching it, so a single-hop file yields a single-hop system.
            const std::int64_t index = parse_int(key, key.substr(3));
            if (index < 1 || index > 64)
                throw ConfigError("config key '" + key + "': hop index out of range");
            try {
                stage.add(static_cast<int>(index), ServiceDistribution::parse(value));
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError("config key '" + key + "': " + e.what());
            }
            saw_hop = true;
            continue;
        }
        run.set(key, value);
    }
    if (saw_hop) run.hops = stage.finish();
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig run = RunConfig::defaults();
    std::istringstream in(text);
    apply_lines(run, in, "config");
    return run;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig run = RunConfig::defaults();
    apply_lines(run, in, path.c_str());
    return run;
}

RunConfig parse_embedded_config(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    std::string block;
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        if (stripped[0] != '#') break;
        block += stripped.substr(1);
        block += '\n';
    }
    return parse_config_text(block);
}

}  // namespace aoitail
