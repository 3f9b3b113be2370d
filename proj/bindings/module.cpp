#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "aexch/analysis.hpp"
#include "aexch/engine.hpp"
#include "aexch/exponent.hpp"
#include "aexch/kinetic.hpp"
#include "aexch/returns.hpp"
#include "aexch/reversibility.hpp"

namespace py = pybind11;
using namespace aexch;

namespace {

std::vector<Knot> to_knots(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<Knot> knots;
    knots.reserve(pairs.size());
    for (const auto& [x, d] : pairs) knots.push_back({x, d});
    return knots;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Conservative multiplicative asset exchange: engine, exponent "
              "solver, kinetic fixed point, reversibility checks";

    py::class_<GainMoments>(m, "GainMoments")
        .def_readonly("log_gain_mean", &GainMoments::log_gain_mean)
        .def_readonly("log_gain_sq_mean", &GainMoments::log_gain_sq_mean)
        .def_readonly("mean_return", &GainMoments::mean_return)
        .def_property_readonly("phi", &GainMoments::phi)
        .def("__repr__", [](const GainMoments& g) {
            return "GainMoments(log_gain_mean=" + std::to_string(g.log_gain_mean) +
                   ", mean_return=" + std::to_string(g.mean_return) + ")";
        });

    py::class_<ReturnDistribution>(m, "ReturnDistribution")
        .def_static("binary", &ReturnDistribution::binary, py::arg("p"), py::arg("f"))
        .def_static("flat", &ReturnDistribution::flat, py::arg("a"), py::arg("b"))
        .def_static(
            "kelly_mixture",
            [](const std::vector<std::pair<double, double>>& w) {
                return ReturnDistribution::kelly_mixture(to_knots(w));
            },
            py::arg("weight_knots"))
        .def_static(
            "tabulated",
            [](const std::vector<std::pair<double, double>>& k) {
                return ReturnDistribution::tabulated(to_knots(k));
            },
            py::arg("knots"))
        .def_static(
            "parse",
            [](const std::string& spec) { return parse_distribution_spec(spec); },
            py::arg("spec"))
        .def_property_readonly("support_lo", &ReturnDistribution::support_lo)
        .def_property_readonly("support_hi", &ReturnDistribution::support_hi)
        .def("density", &ReturnDistribution::density, py::arg("kappa"))
        .def("quantile", &ReturnDistribution::quantile, py::arg("q"))
        .def("moments", [](const ReturnDistribution& d) { return moments(d); })
        .def(
            "generalized_moment",
            [](const ReturnDistribution& d, double T) {
                return generalized_moment(d, T);
            },
            py::arg("T"))
        .def(
            "sample",
            [](const ReturnDistribution& d, std::size_t n, std::uint64_t seed) {
                RngStream rng(seed);
                std::vector<double> out(n);
                for (double& v : out) v = d.sample(rng);
                return out;
            },
            py::arg("n"), py::arg("seed"));

    py::enum_<Phase>(m, "Phase")
        .value("stable", Phase::stable)
        .value("condensing", Phase::condensing)
        .value("critical", Phase::critical);

    py::class_<ExponentReport>(m, "ExponentReport")
        .def_readonly("phase", &ExponentReport::phase)
        .def_readonly("exponent", &ExponentReport::exponent)
        .def_readonly("first_order", &ExponentReport::first_order)
        .def_readonly("log_gain_mean", &ExponentReport::log_gain_mean)
        .def_readonly("no_negative_support", &ExponentReport::no_negative_support)
        .def("__repr__", [](const ExponentReport& r) {
            std::string t = r.exponent ? std::to_string(*r.exponent) : "None";
            return std::string("ExponentReport(phase=") + phase_name(r.phase) +
                   ", T=" + t + ")";
        });

    m.def("solve_exponent", &solve_exponent, py::arg("dist"));
    m.def("yard_sale_critical_p", &yard_sale_critical_p, py::arg("f"));
    m.def("flat_interface_residual", &flat_interface_residual, py::arg("a"),
          py::arg("b"));
    m.def("flat_t1_parameterization", &flat_t1_parameterization, py::arg("z"));

    py::class_<GammaApprox>(m, "GammaApprox")
        .def_readonly("exponent", &GammaApprox::exponent)
        .def_readonly("amplitude", &GammaApprox::amplitude)
        .def_readonly("scale", &GammaApprox::scale)
        .def("density", &GammaApprox::density, py::arg("w"));

    m.def("gamma_approx", &gamma_approx, py::arg("T"));

    m.def(
        "trade",
        [](double w_poor, double w_rich, double kappa) {
            const TradeOutcome t = trade(w_poor, w_rich, kappa);
            return std::make_pair(t.poor, t.rich);
        },
        py::arg("w_poor"), py::arg("w_rich"), py::arg("kappa"));

    m.def(
        "simulate",
        [](const ReturnDistribution& dist, std::size_t agents, std::uint64_t sweeps,
           std::uint64_t seed, double total_wealth) {
            const SimConfig config{.agents = agents,
                                   .sweeps = sweeps,
                                   .dist = dist,
                                   .seed = seed,
                                   .measure_every = 0,
                                   .init = InitKind::egalitarian,
                                   .snapshot_path = {},
                                   .total_wealth = total_wealth};
            return run(config).measurements.back().population.wealths;
        },
        py::arg("dist"), py::arg("agents"), py::arg("sweeps"), py::arg("seed") = 1,
        py::arg("total_wealth") = 0.0,
        "Final wealths after the configured number of sweeps (1 sweep = N trades)");

    m.def(
        "rank_profile",
        [](const std::vector<double>& wealths) {
            Population pop;
            pop.wealths = wealths;
            pop.total_wealth = 0;
            const RankProfile p = rank_profile(pop);
            return std::make_pair(p.rank, p.wealth);
        },
        py::arg("wealths"));

    m.def("predicted_rank_wealth", &predicted_rank_wealth, py::arg("r"), py::arg("t"),
          py::arg("phi"), py::arg("agents"), py::arg("total_wealth"));

    m.def(
        "solve_fixed_point",
        [](const ReturnDistribution& dist, std::size_t nodes, std::size_t max_iters,
           double tol) {
            GridSpec spec;
            if (nodes > 0) spec.nodes = nodes;
            const FixedPointResult r = solve_fixed_point(dist, spec, max_iters, tol);
            return py::make_tuple(r.grid.nodes, r.grid.values, r.residuals);
        },
        py::arg("dist"), py::arg("nodes") = 0, py::arg("max_iters") = 400,
        py::arg("tol") = 1e-8,
        "Stationary wealth density; returns (nodes, values, residual_history)");

    m.def("exponential_condition_residual", &exponential_condition_residual,
          py::arg("dist"), py::arg("w"));

    m.def(
        "moment_drift",
        [](const std::vector<double>& nodes, const std::vector<double>& values,
           const ReturnDistribution& dist) {
            WealthGrid grid;
            grid.nodes = nodes;
            grid.values = values;
            return moment_drift(grid, dist);
        },
        py::arg("nodes"), py::arg("values"), py::arg("dist"));

    m.def(
        "violation",
        [](const ReturnDistribution& dist) { return violation(dist).max_violation; },
        py::arg("dist"), "Maximum relative detailed-balance violation");
    m.def("forward_rate", &forward_rate, py::arg("dist"), py::arg("x"), py::arg("z"),
          py::arg("rho"));
    m.def("backward_rate", &backward_rate, py::arg("dist"), py::arg("x"), py::arg("z"),
          py::arg("rho"));

    py::class_<WealthHistogram>(m, "WealthHistogram")
        .def_readonly("edges", &WealthHistogram::edges)
        .def_readonly("counts", &WealthHistogram::counts)
        .def_readonly("density", &WealthHistogram::density)
        .def_readonly("total_count", &WealthHistogram::total_count);

    py::class_<SlopeFit>(m, "SlopeFit")
        .def_readonly("slope", &SlopeFit::slope)
        .def_readonly("intercept", &SlopeFit::intercept)
        .def_readonly("std_error", &SlopeFit::std_error)
        .def_readonly("w_lo", &SlopeFit::w_lo)
        .def_readonly("w_hi", &SlopeFit::w_hi)
        .def_readonly("bins_used", &SlopeFit::bins_used);

    m.def(
        "histogram",
        [](const std::vector<double>& wealths, std::size_t bins) {
            return histogram(wealths, bins);
        },
        py::arg("wealths"), py::arg("bins") = 96);
    m.def("small_w_exponent", &small_w_exponent, py::arg("hist"));
    m.def(
        "rescaled_to_unit_mean",
        [](const std::vector<double>& w) { return rescaled_to_unit_mean(w); },
        py::arg("wealths"));
    m.def(
        "gini", [](const std::vector<double>& w) { return gini(w); },
        py::arg("wealths"));
    m.def(
        "kolmogorov_distance_exp",
        [](const std::vector<double>& w) { return kolmogorov_distance_exp(w); },
        py::arg("wealths"));

    m.attr("__version__") = "0.1.0";
}
