#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "srmc/chain.hpp"
#include "srmc/diffusion.hpp"
#include "srmc/montecarlo.hpp"
#include "srmc/spectral.hpp"
#include "srmc/tuning.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

std::vector<std::pair<double, double>> as_pairs(const srmc::StationaryDistribution& d) {
    std::vector<std::pair<double, double>> out;
    out.reserve(d.size());
    for (const auto& e : d.entries()) out.emplace_back(e.minus, e.plus);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic resonance in periodically driven two-state Markov chains";

    auto base = py::register_exception<srmc::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<srmc::InvalidParameter>(m, "InvalidParameter", base.ptr());
    py::register_exception<srmc::DegenerateChain>(m, "DegenerateChain", base.ptr());
    py::register_exception<srmc::IdentityMatrix>(m, "IdentityMatrix", base.ptr());
    py::register_exception<srmc::AmbiguousClassification>(m, "AmbiguousClassification",
                                                          base.ptr());
    py::register_exception<srmc::BracketFailure>(m, "BracketFailure", base.ptr());
    py::register_exception<srmc::ZeroPrefactor>(m, "ZeroPrefactor", base.ptr());
    py::register_exception<srmc::LengthMismatch>(m, "LengthMismatch", base.ptr());
    py::register_exception<srmc::IntegratorBlowUp>(m, "IntegratorBlowUp", base.ptr());

    py::class_<srmc::ChainParams>(m, "ChainParams")
        .def(py::init<double, double, double, double, std::int64_t>(), "p"_a, "q"_a, "v"_a,
             "V"_a, "m"_a)
        .def_property_readonly("p", &srmc::ChainParams::deep_prefactor)
        .def_property_readonly("q", &srmc::ChainParams::shallow_prefactor)
        .def_property_readonly("v", &srmc::ChainParams::shallow_depth)
        .def_property_readonly("V", &srmc::ChainParams::deep_depth)
        .def_property_readonly("m", &srmc::ChainParams::half_period)
        .def("__repr__", [](const srmc::ChainParams& c) {
            return "ChainParams(p=" + std::to_string(c.deep_prefactor()) +
                   ", q=" + std::to_string(c.shallow_prefactor()) +
                   ", v=" + std::to_string(c.shallow_depth()) +
                   ", V=" + std::to_string(c.deep_depth()) +
                   ", m=" + std::to_string(c.half_period()) + ")";
        });

    py::class_<srmc::NoiseLevel>(m, "NoiseLevel")
        .def_static("from_x", &srmc::NoiseLevel::from_x, "x"_a)
        .def_static("from_eps", &srmc::NoiseLevel::from_eps, "eps"_a)
        .def_property_readonly("x", &srmc::NoiseLevel::x)
        .def_property_readonly("eps", &srmc::NoiseLevel::eps);

    m.def("eps_from_x", &srmc::eps_from_x, "x"_a);
    m.def("x_from_eps", &srmc::x_from_eps, "eps"_a);

    m.def(
        "stationary_distribution",
        [](const srmc::ChainParams& c, srmc::NoiseLevel n) {
            return as_pairs(srmc::stationary_distribution(c, n));
        },
        "params"_a, "noise"_a, "List of (P(X=-1), P(X=+1)) for phases 0 .. 2m-1.");
    m.def(
        "stationary_oracle",
        [](const srmc::ChainParams& c, srmc::NoiseLevel n) {
            return as_pairs(srmc::stationary_oracle(c, n));
        },
        "params"_a, "noise"_a);

    m.def("spa", &srmc::spa, "params"_a, "noise"_a);
    m.def(
        "spa_from_distribution",
        [](const srmc::ChainParams& c, srmc::NoiseLevel n) {
            return srmc::spa_from_distribution(c, n).eta;
        },
        "params"_a, "noise"_a);
    m.def("input_signal_power", &srmc::input_signal_power, "params"_a);
    m.def("expected_output_component", &srmc::expected_output_component, "params"_a,
          "noise"_a);
    m.def("spa_derivative", &srmc::spa_derivative, "params"_a, "noise"_a);

    m.def(
        "region_boundary",
        [](double q, double beta, std::int64_t half_period) {
            const auto b = srmc::region_boundary(q, beta, half_period);
            return py::make_tuple(b.value, b.discriminant);
        },
        "q"_a, "beta"_a, "m"_a, "Returns (p_minus or None, discriminant).");
    m.def(
        "classify",
        [](const srmc::ChainParams& c) { return std::string(srmc::to_string(srmc::classify(c).tag)); },
        "params"_a);
    m.def(
        "classify_numeric",
        [](const srmc::ChainParams& c, int grid) {
            return std::string(srmc::to_string(srmc::classify_numeric(c, grid).region.tag));
        },
        "params"_a, "grid_size"_a = 2000);
    m.def(
        "find_resonance",
        [](const srmc::ChainParams& c) -> py::object {
            const auto r = srmc::find_resonance(c);
            if (!r) return py::none();
            return py::dict("x_hat"_a = r->x_hat, "eps_hat"_a = r->eps_hat(),
                            "eta_max"_a = r->eta_max);
        },
        "params"_a);
    m.def("find_zero", &srmc::find_zero, "params"_a);
    m.def("asymptotic_resonance", &srmc::asymptotic_resonance, "params"_a);
    m.def("optimal_half_period", &srmc::optimal_half_period, "eps"_a, "p"_a, "q"_a, "v"_a,
          "V"_a);
    m.def("max_amplification", &srmc::max_amplification, "v"_a, "V"_a);
    m.def(
        "tune",
        [](const srmc::ChainParams& c) {
            const auto r = srmc::tune(c);
            return py::dict("region"_a = std::string(srmc::to_string(r.region.tag)),
                            "x_hat"_a = r.x_hat, "eps_hat"_a = r.eps_hat,
                            "eta_max"_a = r.eta_max, "x_star"_a = r.x_star,
                            "x_asymptotic"_a = r.x_asymptotic, "m_of_eps"_a = r.m_of_eps,
                            "eta_limit"_a = r.eta_limit);
        },
        "params"_a);

    m.def(
        "estimate_spa",
        [](const srmc::ChainParams& c, srmc::NoiseLevel n, std::uint64_t seed,
           std::int64_t periods, std::int64_t burn_in, std::int64_t replicas) {
            srmc::SpaEstimate e;
            {
                py::gil_scoped_release release;
                e = srmc::estimate_spa(c, n, {seed, periods, burn_in, replicas});
            }
            return py::dict("eta_hat"_a = e.eta_hat, "std_error"_a = e.std_error,
                            "n_windows"_a = e.n_windows);
        },
        "params"_a, "noise"_a, "seed"_a = 0, "periods"_a = 1000, "burn_in"_a = 10,
        "replicas"_a = 1);
    m.def(
        "simulate_chain",
        [](const srmc::ChainParams& c, srmc::NoiseLevel n, std::uint64_t seed,
           std::int64_t periods, std::int64_t burn_in, std::int64_t replica) {
            const auto t = srmc::simulate_chain(c, n, {seed, periods, burn_in, 1}, replica);
            return std::vector<int>(t.states.begin(), t.states.end());
        },
        "params"_a, "noise"_a, "seed"_a = 0, "periods"_a = 10, "burn_in"_a = 0,
        "replica"_a = 0);

    m.def(
        "deviation_measure",
        [](double v, double V, double lambda, double eps, double dt, double delta, double x0,
           const std::string& reference, std::uint64_t seed, std::optional<double> horizon) {
            srmc::DeviationExperiment ex;
            ex.lambda = lambda;
            ex.eps = eps;
            ex.dt = dt;
            ex.delta = delta;
            ex.x0 = x0;
            ex.seed = seed;
            ex.horizon = horizon;
            if (reference == "sign") ex.reference = srmc::Reference::SignOfStart;
            else if (reference == "phase") ex.reference = srmc::Reference::Phase;
            else throw srmc::InvalidParameter("reference must be 'sign' or 'phase'");
            py::gil_scoped_release release;
            const srmc::SwitchingPotential potential(v, V);
            return srmc::deviation_measure(srmc::simulate_sde(potential, ex), ex);
        },
        "v"_a = 1.0, "V"_a = 2.0, "lambda_"_a = 1.5, "eps"_a = 0.45, "dt"_a = 1e-3,
        "delta"_a = 0.5, "x0"_a = -1.0, "reference"_a = "phase", "seed"_a = 0,
        "horizon"_a = py::none());
    m.def(
        "mean_exit_time",
        [](double v, double V, double eps, double dt, std::uint64_t seed, std::int64_t paths,
           std::int64_t max_steps) {
            srmc::ExitTimeEstimate e;
            {
                py::gil_scoped_release release;
                e = srmc::mean_exit_time(srmc::SwitchingPotential(v, V), eps, dt, seed, paths,
                                         max_steps);
            }
            return py::dict("mean"_a = e.mean, "std_error"_a = e.std_error,
                            "completed"_a = e.completed, "timeouts"_a = e.timeouts);
        },
        "v"_a, "V"_a, "eps"_a, "dt"_a = 1e-3, "seed"_a = 0, "paths"_a = 100,
        "max_steps"_a = 100'000'000);
}
