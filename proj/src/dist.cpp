#include "aoitail/dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "aoitail/errors.hpp"
#include "aoitail/specfun.hpp"
#include "num_text.hpp"
#include "quad.hpp"

namespace aoitail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lchoose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P{Y > m} where Y counts Bernoulli(p) trials until the n-th success.
double nb_survival(int n, double p, long long m) {
    if (m < n) {
        return 1.0;
    }
    if (p >= 1.0) {
        return 0.0;
    }
    return specfun::incomplete_beta_reg(1.0 - p, static_cast<double>(m - n + 1), n);
}

double nb_log_pmf(int n, double p, long long y) {
    return lchoose(static_cast<double>(y - 1), static_cast<double>(n - 1)) + n * std::log(p) +
           static_cast<double>(y - n) * std::log1p(-p);
}

struct GammaComp {
    double shape;  // integer-valued
    double rate;
};

struct MixTerm {
    double weight;
    std::vector<GammaComp> comps;
};

// Distribution of an n-fold iid service sum: a deterministic offset plus
// either a negative-binomial lattice part or a mixture of gamma convolutions.
struct SumLaw {
    double offset = 0.0;
    bool lattice = false;
    int nb_count = 0;
    double nb_p = 1.0;
    double slot = 1.0;
    std::vector<MixTerm> mixture;

    bool pure_offset() const { return !lattice && mixture.empty(); }
};

SumLaw make_sum_law(const ServiceDistribution& d, int n, int budget) {
    SumLaw law;
    switch (d.kind()) {
        case DistKind::deterministic:
            law.offset = n * d.value();
            break;
        case DistKind::geometric:
            if (d.success_prob() >= 1.0) {
                law.offset = n * d.slot();
            } else {
                law.lattice = true;
                law.nb_count = n;
                law.nb_p = d.success_prob();
                law.slot = d.slot();
            }
            break;
        case DistKind::exponential:
            law.mixture.push_back({1.0, {{static_cast<double>(n), d.rate1()}}});
            break;
        case DistKind::erlang:
            law.mixture.push_back({1.0, {{static_cast<double>(n) * d.shape(), d.rate1()}}});
            break;
        case DistKind::hyperexponential: {
            if (n > budget) {
                throw BudgetError("hyperexponential sum of length " + std::to_string(n) +
                                  " exceeds the numerical convolution budget (" +
                                  std::to_string(budget) + ")");
            }
            if (d.rate1() == d.rate2()) {
                law.mixture.push_back({1.0, {{static_cast<double>(n), d.rate1()}}});
                break;
            }
            const double p = d.mix_prob();
            for (int k = 0; k <= n; ++k) {
                const double lw = lchoose(n, k) + (k > 0 ? k * std::log(p) : 0.0) +
                                  (n - k > 0 ? (n - k) * std::log1p(-p) : 0.0);
                MixTerm term{std::exp(lw), {}};
                if (k > 0) term.comps.push_back({static_cast<double>(k), d.rate1()});
                if (n - k > 0) term.comps.push_back({static_cast<double>(n - k), d.rate2()});
                law.mixture.push_back(std::move(term));
            }
            break;
        }
    }
    return law;
}

double gamma_log_pdf(const GammaComp& c, double y) {
    return c.shape * std::log(c.rate) + (c.shape - 1.0) * std::log(y) - c.rate * y -
           std::lgamma(c.shape);
}

double gamma_pdf(const GammaComp& c, double y) {
    if (y < 0.0) return 0.0;
    if (y == 0.0) {
        return c.shape == 1.0 ? c.rate : 0.0;
    }
    return std::exp(gamma_log_pdf(c, y));
}

void merge_equal_rates(std::vector<GammaComp>& comps) {
    std::sort(comps.begin(), comps.end(),
              [](const GammaComp& a, const GammaComp& b) { return a.rate < b.rate; });
    std::vector<GammaComp> merged;
    for (const auto& c : comps) {
        if (!merged.empty() && merged.back().rate == c.rate) {
            merged.back().shape += c.shape;
        } else {
            merged.push_back(c);
        }
    }
    comps = std::move(merged);
}

// P{sum of independent Gamma(shape_j, rate_j) > z}.  One component is exact;
// several are reduced by conditioning on the last one, integrating its density
// against the tail of the rest.
double gamma_comps_tail(std::vector<GammaComp> comps, double z) {
    if (z <= 0.0) {
        return 1.0;
    }
    merge_equal_rates(comps);
    if (comps.size() == 1) {
        return specfun::upper_incomplete_gamma_reg(comps[0].shape, comps[0].rate * z);
    }
    const GammaComp head = comps.back();
    comps.pop_back();
    const double closing = specfun::upper_incomplete_gamma_reg(head.shape, head.rate * z);
    auto integrand = [&](double y) {
        return gamma_pdf(head, y) * gamma_comps_tail(comps, z - y);
    };
    const double coarse = detail::simpson_panels(integrand, 0.0, z, 128);
    const double scale = std::max({closing, coarse, 1e-280});
    const double integral = detail::adaptive_simpson(integrand, 0.0, z, scale * 1e-11);
    return std::min(1.0, closing + integral);
}

double mixture_tail(const SumLaw& law, double z) {
    if (z <= 0.0) {
        return 1.0;
    }
    double total = 0.0;
    for (const auto& term : law.mixture) {
        total += term.weight * gamma_comps_tail(term.comps, z);
    }
    return std::min(1.0, total);
}

// Tail of the random part of `law` (its offset has already been subtracted).
double random_tail(const SumLaw& law, double z) {
    if (law.pure_offset()) {
        return z < 0.0 ? 1.0 : 0.0;
    }
    if (law.lattice) {
        if (z < law.nb_count * law.slot) {
            return 1.0;
        }
        const long long m = static_cast<long long>(std::floor(z / law.slot));
        return nb_survival(law.nb_count, law.nb_p, m);
    }
    return mixture_tail(law, z);
}

// Conditioning sum for lattice + continuous-mixture cross tails.
double lattice_cross_mixture(const SumLaw& lat, const SumLaw& mix, double z) {
    const long long y_star = static_cast<long long>(std::floor(z / lat.slot));
    if (y_star < lat.nb_count) {
        return 1.0;
    }
    double total = 0.0;
    for (long long y = lat.nb_count; y <= y_star; ++y) {
        total += std::exp(nb_log_pmf(lat.nb_count, lat.nb_p, y)) *
                 mixture_tail(mix, z - y * lat.slot);
    }
    total += nb_survival(lat.nb_count, lat.nb_p, y_star);
    return std::min(1.0, total);
}

// Conditioning sum for two lattice parts (slots may differ).
double lattice_cross_lattice(const SumLaw& a, const SumLaw& b, double z) {
    if (z < a.nb_count * a.slot + b.nb_count * b.slot) {
        return 1.0;
    }
    // Enumerate b; once b alone exceeds z minus a's minimum, the a-tail is 1.
    const long long y_star =
        static_cast<long long>(std::floor((z - a.nb_count * a.slot) / b.slot));
    double total = 0.0;
    for (long long y = b.nb_count; y <= y_star; ++y) {
        const long long m =
            static_cast<long long>(std::floor((z - y * b.slot) / a.slot));
        total += std::exp(nb_log_pmf(b.nb_count, b.nb_p, y)) * nb_survival(a.nb_count, a.nb_p, m);
    }
    total += nb_survival(b.nb_count, b.nb_p, y_star);
    return std::min(1.0, total);
}

std::string format_param(double v) { return detail::format_double(v); }

double parse_number(std::string_view text, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(std::string(text), &pos);
        if (pos != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for " + what + ": '" + std::string(text) + "'");
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

ServiceDistribution ServiceDistribution::geometric(double success_prob, double slot) {
    if (!(success_prob > 0.0) || !(success_prob <= 1.0)) {
        throw std::invalid_argument("geometric: success probability must lie in (0, 1]");
    }
    if (!(slot > 0.0)) {
        throw std::invalid_argument("geometric: slot must be positive");
    }
    ServiceDistribution d;
    d.kind_ = DistKind::geometric;
    d.p_ = success_prob;
    d.slot_ = slot;
    return d;
}

ServiceDistribution ServiceDistribution::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("exponential: rate must be positive");
    }
    ServiceDistribution d;
    d.kind_ = DistKind::exponential;
    d.rate1_ = rate;
    return d;
}

ServiceDistribution ServiceDistribution::erlang(int shape, double rate) {
    if (shape < 1) {
        throw std::invalid_argument("erlang: shape must be a positive integer");
    }
    if (!(rate > 0.0)) {
        throw std::invalid_argument("erlang: rate must be positive");
    }
    ServiceDistribution d;
    d.kind_ = DistKind::erlang;
    d.shape_ = shape;
    d.rate1_ = rate;
    return d;
}

ServiceDistribution ServiceDistribution::hyperexponential(double mix_prob, double rate1,
                                                          double rate2) {
    if (!(mix_prob >= 0.0) || !(mix_prob <= 1.0)) {
        throw std::invalid_argument("hyperexponential: mix probability must lie in [0, 1]");
    }
    if (!(rate1 > 0.0) || !(rate2 > 0.0)) {
        throw std::invalid_argument("hyperexponential: rates must be positive");
    }
    ServiceDistribution d;
    d.kind_ = DistKind::hyperexponential;
    d.mix_ = mix_prob;
    d.rate1_ = rate1;
    d.rate2_ = rate2;
    return d;
}

ServiceDistribution ServiceDistribution::deterministic(double value) {
    if (!(value >= 0.0)) {
        throw std::invalid_argument("deterministic: value must be >= 0");
    }
    ServiceDistribution d;
    d.kind_ = DistKind::deterministic;
    d.value_ = value;
    return d;
}

ServiceDistribution ServiceDistribution::parse(std::string_view text) {
    text = trim(text);
    std::string kind;
    std::map<std::string, std::string> params;
    const auto open = text.find('(');
    if (open == std::string_view::npos) {
        kind = std::string(trim(text));
    } else {
        if (text.back() != ')') {
            throw ConfigError("distribution spec missing closing ')': '" + std::string(text) + "'");
        }
        kind = std::string(trim(text.substr(0, open)));
        std::string_view body = text.substr(open + 1, text.size() - open - 2);
        while (!body.empty()) {
            const auto comma = body.find(',');
            std::string_view item = trim(body.substr(0, comma));
            if (!item.empty()) {
                const auto eq = item.find('=');
                if (eq == std::string_view::npos) {
                    throw ConfigError("distribution parameter must be name=value: '" +
                                      std::string(item) + "'");
                }
                params[std::string(trim(item.substr(0, eq)))] =
                    std::string(trim(item.substr(eq + 1)));
            }
            if (comma == std::string_view::npos) break;
            body.remove_prefix(comma + 1);
        }
    }

    auto take = [&](const char* name) -> std::string {
        auto it = params.find(name);
        if (it == params.end()) {
            throw ConfigError("distribution '" + kind + "' requires parameter '" + name + "'");
        }
        std::string v = it->second;
        params.erase(it);
        return v;
    };
    auto take_or = [&](const char* name, double fallback) -> double {
        auto it = params.find(name);
        if (it == params.end()) return fallback;
        const double v = parse_number(it->second, name);
        params.erase(it);
        return v;
    };
    auto finish = [&](ServiceDistribution d) {
        if (!params.empty()) {
            throw ConfigError("unknown parameter '" + params.begin()->first +
                              "' for distribution '" + kind + "'");
        }
        return d;
    };

    try {
        if (kind == "geometric") {
            const double p = parse_number(take("p"), "p");
            const double slot = take_or("slot", 1.0);
            return finish(geometric(p, slot));
        }
        if (kind == "exponential") {
            return finish(exponential(parse_number(take("mu"), "mu")));
        }
        if (kind == "erlang") {
            const double b = parse_number(take("b"), "b");
            const double lambda = parse_number(take("lambda"), "lambda");
            if (b != std::floor(b)) {
                throw ConfigError("erlang shape 'b' must be an integer");
            }
            return finish(erlang(static_cast<int>(b), lambda));
        }
        if (kind == "hyperexponential") {
            const double p = parse_number(take("p"), "p");
            const double l1 = parse_number(take("lambda1"), "lambda1");
            const double l2 = parse_number(take("lambda2"), "lambda2");
            return finish(hyperexponential(p, l1, l2));
        }
        if (kind == "deterministic") {
            return finish(deterministic(parse_number(take("b"), "b")));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid distribution parameters: ") + e.what());
    }
    throw ConfigError("unknown distribution kind '" + kind + "'");
}

double ServiceDistribution::mgf(double s) const {
    switch (kind_) {
        case DistKind::geometric: {
            const double e = std::exp(s * slot_);
            if (p_ >= 1.0) {
                return e;
            }
            const double qe = (1.0 - p_) * e;
            if (qe >= 1.0) {
                return kInf;
            }
            return p_ * e / (1.0 - qe);
        }
        case DistKind::exponential:
            return s < rate1_ ? rate1_ / (rate1_ - s) : kInf;
        case DistKind::erlang:
            return s < rate1_ ? std::pow(rate1_ / (rate1_ - s), shape_) : kInf;
        case DistKind::hyperexponential:
            if (s >= rate1_ || s >= rate2_) {
                return kInf;
            }
            return mix_ * rate1_ / (rate1_ - s) + (1.0 - mix_) * rate2_ / (rate2_ - s);
        case DistKind::deterministic:
            return std::exp(s * value_);
    }
    return kInf;
}

double ServiceDistribution::mgf_domain_sup() const {
    switch (kind_) {
        case DistKind::geometric:
            return p_ >= 1.0 ? kInf : -std::log1p(-p_) / slot_;
        case DistKind::exponential:
            return rate1_;
        case DistKind::erlang:
            return rate1_;
        case DistKind::hyperexponential:
            return std::min(rate1_, rate2_);
        case DistKind::deterministic:
            return kInf;
    }
    return kInf;
}

double ServiceDistribution::mean_rate() const {
    switch (kind_) {
        case DistKind::geometric:
            return p_ / slot_;
        case DistKind::exponential:
            return rate1_;
        case DistKind::erlang:
            return rate1_ / shape_;
        case DistKind::hyperexponential:
            return 1.0 / (mix_ / rate1_ + (1.0 - mix_) / rate2_);
        case DistKind::deterministic:
            if (value_ == 0.0) {
                throw std::domain_error(
                    "deterministic(0) is a pass-through hop with no mean rate");
            }
            return 1.0 / value_;
    }
    return 0.0;
}

double ServiceDistribution::support_min() const {
    switch (kind_) {
        case DistKind::geometric:
            return slot_;
        case DistKind::deterministic:
            return value_;
        default:
            return 0.0;
    }
}

double ServiceDistribution::support_max() const {
    switch (kind_) {
        case DistKind::geometric:
            return p_ >= 1.0 ? slot_ : kInf;
        case DistKind::deterministic:
            return value_;
        default:
            return kInf;
    }
}

double ServiceDistribution::sum_tail(int n, double x, int convolution_budget) const {
    if (n < 1) {
        throw std::invalid_argument("sum_tail: n must be >= 1");
    }
    const SumLaw law = make_sum_law(*this, n, convolution_budget);
    return random_tail(law, x - law.offset);
}

double ServiceDistribution::sample(Rng& rng) const {
    switch (kind_) {
        case DistKind::geometric: {
            if (p_ >= 1.0) {
                return slot_;
            }
            const double u = rng.next_unit_positive();
            const double failures = std::floor(std::log(u) / std::log1p(-p_));
            return slot_ * (failures + 1.0);
        }
        case DistKind::exponential:
            return -std::log(rng.next_unit_positive()) / rate1_;
        case DistKind::erlang: {
            double total = 0.0;
            for (int i = 0; i < shape_; ++i) {
                total -= std::log(rng.next_unit_positive());
            }
            return total / rate1_;
        }
        case DistKind::hyperexponential: {
            const double rate = rng.next_unit() < mix_ ? rate1_ : rate2_;
            return -std::log(rng.next_unit_positive()) / rate;
        }
        case DistKind::deterministic:
            return value_;
    }
    return 0.0;
}

std::string ServiceDistribution::describe() const {
    switch (kind_) {
        case DistKind::geometric:
            return "geometric(p=" + format_param(p_) + ",slot=" + format_param(slot_) + ")";
        case DistKind::exponential:
            return "exponential(mu=" + format_param(rate1_) + ")";
        case DistKind::erlang:
            return "erlang(b=" + std::to_string(shape_) + ",lambda=" + format_param(rate1_) + ")";
        case DistKind::hyperexponential:
            return "hyperexponential(p=" + format_param(mix_) + ",lambda1=" + format_param(rate1_) +
                   ",lambda2=" + format_param(rate2_) + ")";
        case DistKind::deterministic:
            return "deterministic(b=" + format_param(value_) + ")";
    }
    return "";
}

double cross_sum_tail(const ServiceDistribution& d1, int n1, const ServiceDistribution& d2,
                      int n2, double x, int convolution_budget) {
    if (n1 < 1 || n2 < 1) {
        throw std::invalid_argument("cross_sum_tail: n1 and n2 must be >= 1");
    }
    const SumLaw a = make_sum_law(d1, n1, convolution_budget);
    const SumLaw b = make_sum_law(d2, n2, convolution_budget);
    const double z = x - a.offset - b.offset;

    if (a.pure_offset() && b.pure_offset()) {
        return z < 0.0 ? 1.0 : 0.0;
    }
    if (a.pure_offset()) {
        return random_tail(b, z);
    }
    if (b.pure_offset()) {
        return random_tail(a, z);
    }
    if (a.lattice && b.lattice) {
        return lattice_cross_lattice(a, b, z);
    }
    if (a.lattice != b.lattice) {
        const SumLaw& lat = a.lattice ? a : b;
        const SumLaw& mix = a.lattice ? b : a;
        return lattice_cross_mixture(lat, mix, z);
    }
    if (z <= 0.0) {
        return 1.0;
    }
    double total = 0.0;
    for (const auto& ta : a.mixture) {
        for (const auto& tb : b.mixture) {
            std::vector<GammaComp> comps = ta.comps;
            comps.insert(comps.end(), tb.comps.begin(), tb.comps.end());
            total += ta.weight * tb.weight * gamma_comps_tail(std::move(comps), z);
        }
    }
    return std::min(1.0, total);
}

}  // namespace aoitail
