// Python bindings for the bounds, optimization, and simulation operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aoitail/bounds.hpp"
#include "aoitail/dist.hpp"
#include "aoitail/errors.hpp"
#include "aoitail/optimize.hpp"
#include "aoitail/rng.hpp"
#include "aoitail/sim.hpp"

namespace py = pybind11;
using namespace aoitail;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Age-of-information violation bounds, rate optimization, and simulation";

    py::register_exception<InfeasibleError>(m, "InfeasibleError");
    py::register_exception<BudgetError>(m, "BudgetError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::enum_<DistKind>(m, "DistKind")
        .value("geometric", DistKind::geometric)
        .value("exponential", DistKind::exponential)
        .value("erlang", DistKind::erlang)
        .value("hyperexponential", DistKind::hyperexponential)
        .value("deterministic", DistKind::deterministic);

    py::class_<ServiceDistribution>(m, "ServiceDistribution")
        .def_static("geometric", &ServiceDistribution::geometric, py::arg("success_prob"),
                    py::arg("slot") = 1.0)
        .def_static("exponential", &ServiceDistribution::exponential, py::arg("rate"))
        .def_static("erlang", &ServiceDistribution::erlang, py::arg("shape"), py::arg("rate"))
        .def_static("hyperexponential", &ServiceDistribution::hyperexponential,
                    py::arg("mix_prob"), py::arg("rate1"), py::arg("rate2"))
        .def_static("deterministic", &ServiceDistribution::deterministic, py::arg("value"))
        .def_static("parse", [](const std::string& text) {
            return ServiceDistribution::parse(text);
        }, py::arg("text"))
        .def_property_readonly("kind", &ServiceDistribution::kind)
        .def("mgf", &ServiceDistribution::mgf, py::arg("s"))
        .def("mgf_domain_sup", &ServiceDistribution::mgf_domain_sup)
        .def("mean_rate", &ServiceDistribution::mean_rate)
        .def("support_min", &ServiceDistribution::support_min)
        .def("support_max", &ServiceDistribution::support_max)
        .def("sum_tail", &ServiceDistribution::sum_tail, py::arg("n"), py::arg("x"),
             py::arg("convolution_budget") = ServiceDistribution::kDefaultConvolutionBudget)
        .def("describe", &ServiceDistribution::describe)
        .def("__repr__", &ServiceDistribution::describe)
        .def("__eq__", [](const ServiceDistribution& a, const ServiceDistribution& b) {
            return a == b;
        });

    m.def("cross_sum_tail", &cross_sum_tail, py::arg("dist1"), py::arg("n1"), py::arg("dist2"),
          py::arg("n2"), py::arg("x"),
          py::arg("convolution_budget") = ServiceDistribution::kDefaultConvolutionBudget);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init([](std::vector<ServiceDistribution> hops, double rate, double age_limit) {
                 return SystemConfig{std::move(hops), rate, age_limit};
             }),
             py::arg("hops"), py::arg("rate"), py::arg("age_limit"))
        .def_readwrite("hops", &SystemConfig::hops)
        .def_readwrite("rate", &SystemConfig::rate)
        .def_readwrite("age_limit", &SystemConfig::age_limit)
        .def("hop_count", &SystemConfig::hop_count)
        .def("bottleneck_rate", &SystemConfig::bottleneck_rate)
        .def("feasible", &SystemConfig::feasible);

    py::class_<StabilityWindow>(m, "StabilityWindow")
        .def_readonly("s_low", &StabilityWindow::s_low)
        .def_readonly("s_high", &StabilityWindow::s_high)
        .def_readonly("empty", &StabilityWindow::empty)
        .def("contains", &StabilityWindow::contains, py::arg("s"));

    py::enum_<BoundKind>(m, "BoundKind")
        .value("chernoff", BoundKind::chernoff)
        .value("alpha_relaxed", BoundKind::alpha_relaxed);

    py::class_<BoundResult>(m, "BoundResult")
        .def_readonly("value", &BoundResult::value)
        .def_readonly("s_star", &BoundResult::s_star)
        .def_readonly("kind", &BoundResult::kind)
        .def_readonly("terms", &BoundResult::terms)
        .def_readonly("alpha", &BoundResult::alpha);

    m.def("stability_window", &stability_window, py::arg("cfg"));
    m.def("beta", &beta, py::arg("hop"), py::arg("s"), py::arg("rate"));
    m.def("phi_single", &phi_single, py::arg("hop"), py::arg("v"), py::arg("rate"),
          py::arg("age_limit"));
    m.def("phi_two", &phi_two, py::arg("hop1"), py::arg("hop2"), py::arg("v0"), py::arg("v1"),
          py::arg("rate"), py::arg("age_limit"));
    m.def("psi_chernoff", &psi_chernoff, py::arg("cfg"), py::arg("s"));
    m.def("minimize_psi_over_s", &minimize_psi_over_s, py::arg("cfg"));
    m.def("alpha_relaxed_single", &alpha_relaxed_single, py::arg("cfg"), py::arg("terms"));
    m.def("alpha_relaxed_two", &alpha_relaxed_two, py::arg("cfg"), py::arg("terms"));
    m.def("phi_closed_form", &phi_closed_form, py::arg("beta1"), py::arg("beta2"));
    m.def("alpha_tail_factor", &alpha_tail_factor, py::arg("beta1"), py::arg("beta2"),
          py::arg("terms"));
    m.def("bounded_support_zero_rate", &bounded_support_zero_rate, py::arg("cfg"),
          py::arg("support_bound"));

    py::enum_<SolveMethod>(m, "SolveMethod")
        .value("chernoff_ubmp", SolveMethod::chernoff_ubmp)
        .value("alpha_ubmp", SolveMethod::alpha_ubmp);

    py::class_<RateSolution>(m, "RateSolution")
        .def_readonly("rate", &RateSolution::rate)
        .def_readonly("objective", &RateSolution::objective)
        .def_readonly("s_star", &RateSolution::s_star)
        .def_readonly("method", &RateSolution::method)
        .def_readonly("grid_step", &RateSolution::grid_step);

    m.def("solve_chernoff_ubmp", &solve_chernoff_ubmp, py::arg("hops"), py::arg("age_limit"),
          py::arg("rate_bounds") = std::nullopt);
    m.def("solve_alpha_ubmp", &solve_alpha_ubmp, py::arg("hops"), py::arg("age_limit"),
          py::arg("terms") = 30, py::arg("grid_step") = 0.025);

    py::enum_<Policy>(m, "Policy")
        .value("fcfs_infinite", Policy::fcfs_infinite)
        .value("fcfs_unit_buffer", Policy::fcfs_unit_buffer)
        .value("lgfs_unit_buffer", Policy::lgfs_unit_buffer);

    py::class_<SimEstimate>(m, "SimEstimate")
        .def_readonly("violation_prob", &SimEstimate::violation_prob)
        .def_readonly("half_width", &SimEstimate::half_width)
        .def_readonly("horizon", &SimEstimate::horizon)
        .def_readonly("warmup", &SimEstimate::warmup)
        .def_readonly("seed", &SimEstimate::seed)
        .def_readonly("policy", &SimEstimate::policy)
        .def_readonly("unstable", &SimEstimate::unstable);

    m.def(
        "simulate_violation",
        [](const SystemConfig& cfg, Policy policy, double horizon, double warmup,
           std::uint64_t seed, int batches) {
            py::gil_scoped_release release;
            return simulate_violation(cfg, policy, horizon, warmup, seed, batches);
        },
        py::arg("cfg"), py::arg("policy"), py::arg("horizon"), py::arg("warmup"),
        py::arg("seed"), py::arg("batches") = 20);
    m.def(
        "transient_violation",
        [](const SystemConfig& cfg, double t, int replications, std::uint64_t seed, int jobs) {
            py::gil_scoped_release release;
            return transient_violation(cfg, t, replications, seed, jobs);
        },
        py::arg("cfg"), py::arg("t"), py::arg("replications"), py::arg("seed"),
        py::arg("jobs") = 1);
    m.def(
        "tagged_departure_violation",
        [](const SystemConfig& cfg, double t, int replications, std::uint64_t seed, int jobs) {
            py::gil_scoped_release release;
            return tagged_departure_violation(cfg, t, replications, seed, jobs);
        },
        py::arg("cfg"), py::arg("t"), py::arg("replications"), py::arg("seed"),
        py::arg("jobs") = 1);
    m.def(
        "compare_policies",
        [](const SystemConfig& cfg, const std::vector<double>& rate_grid, double horizon,
           double warmup, std::uint64_t seed, int jobs) {
            py::gil_scoped_release release;
            return compare_policies(cfg, rate_grid, horizon, warmup, seed, jobs);
        },
        py::arg("cfg"), py::arg("rate_grid"), py::arg("horizon"), py::arg("warmup"),
        py::arg("seed"), py::arg("jobs") = 1);

    m.def("mix_seed", &mix_seed, py::arg("seed"), py::arg("index"));
}
