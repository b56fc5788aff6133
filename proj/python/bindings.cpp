#include "fbd/errors.hpp"
#include "fbd/experiments.hpp"
#include "fbd/heat_kernel.hpp"
#include "fbd/integrator.hpp"
#include "fbd/io.hpp"
#include "fbd/scaling.hpp"
#include "fbd/single_interface.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fbd;

namespace {

py::dict experiment_dict(const experiments::ExperimentResult& r)
{
    py::dict d;
    d["name"] = r.name;
    d["eps"] = r.eps;
    d["tau"] = r.tau;
    d["interfaces"] = r.interfaces;
    d["metrics"] = r.metrics;
    py::list checks;
    for (const auto& c : r.checks) checks.append(py::make_tuple(c.name, c.passed, c.value));
    d["checks"] = checks;
    d["passed"] = r.passed();
    py::list u;
    for (const auto& s : r.traj.snapshots) u.append(s.u);
    d["u"] = u;
    d["first_index"] = r.traj.first_index;
    return d;
}

} // namespace

PYBIND11_MODULE(_fbd, m)
{
    m.doc() = "Forward-backward diffusion lattices: kernel, solvers and experiments";
    m.attr("__version__") = io::kVersion;

    py::register_exception<Error>(m, "FbdError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    py::class_<Potential>(m, "Potential")
        .def_static("smooth_demo", &Potential::smooth_demo)
        .def_static("piecewise_quadratic", &Potential::piecewise_quadratic)
        .def("phi", &Potential::phi)
        .def("dphi", &Potential::dphi)
        .def("ddphi", &Potential::ddphi)
        .def_property_readonly("u_star_lo", &Potential::u_star_lo)
        .def_property_readonly("u_star_hi", &Potential::u_star_hi)
        .def_property_readonly("u_hash_lo", &Potential::u_hash_lo)
        .def_property_readonly("u_hash_hi", &Potential::u_hash_hi)
        .def_property_readonly("p_star_lo", &Potential::p_star_lo)
        .def_property_readonly("p_star_hi", &Potential::p_star_hi)
        .def("branch_minus", &Potential::branch_minus)
        .def("branch_plus", &Potential::branch_plus);

    m.def(
        "kernel_row",
        [](double t, long jmax, const std::string& method) {
            auto meth = method == "fourier" ? kernel::Method::fourier_quadrature : kernel::Method::bessel_series;
            return kernel::KernelEvaluator(meth).row(t, jmax);
        },
        py::arg("t"), py::arg("jmax"), py::arg("method") = "bessel", "g_0..g_jmax at time t");

    m.def("preset_names", &experiments::preset_names);
    m.def(
        "run_preset",
        [](const std::string& name, long N, double tau_end, std::uint64_t seed) {
            auto p = experiments::preset_params(name);
            if (N > 0) p.N = N;
            if (tau_end > 0) p.tau_end = tau_end;
            p.seed = seed;
            experiments::ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = experiments::general_phi_experiment(name, p);
            }
            return experiment_dict(r);
        },
        py::arg("name"), py::arg("N") = 0, py::arg("tau_end") = 0.0, py::arg("seed") = 12345);

    m.def(
        "run_single_interface",
        [](double a, double b, double ell, double eps, double tau_end) {
            scaling::ProfileSpec prof;
            prof.a = a;
            prof.b = b;
            prof.ell = ell;
            scaling::ScaledRun r;
            {
                py::gil_scoped_release release;
                r = scaling::run_scaled(prof, eps, tau_end, 20);
            }
            auto chk = si::check_log(r.run.log);
            py::dict d;
            std::vector<double> t, ul, jump;
            std::vector<long> k;
            for (const auto& e : r.run.log.events) {
                k.push_back(e.k);
                t.push_back(e.t_star);
                ul.push_back(e.u_left);
                jump.push_back(e.jump());
            }
            d["k"] = k;
            d["t_star"] = t;
            d["u_left"] = ul;
            d["jump"] = jump;
            d["alpha"] = r.data.alpha;
            d["beta"] = r.data.beta;
            d["log_ok"] = chk.ok();
            return d;
        },
        py::arg("a") = 1.0, py::arg("b") = 0.25, py::arg("ell") = 0.25, py::arg("eps") = 0.1,
        py::arg("tau_end") = 0.2);

    m.def(
        "solve_limit",
        [](double a, double b, double ell, double tau_end, double dxi, double xi_half) {
            scaling::ProfileSpec prof;
            prof.a = a;
            prof.b = b;
            prof.ell = ell;
            macro::MacroSolution s;
            {
                py::gil_scoped_release release;
                s = scaling::solve_limit(prof, tau_end, dxi, xi_half, 50);
            }
            py::dict d;
            d["tau"] = s.tau_grid;
            d["xi"] = s.xi_grid;
            d["xi_star"] = s.xi_star;
            d["P"] = s.P;
            d["max_conservation_error"] = s.max_conservation_error;
            return d;
        },
        py::arg("a") = 1.0, py::arg("b") = 0.25, py::arg("ell") = 0.25, py::arg("tau_end") = 0.1,
        py::arg("dxi") = 0.02, py::arg("xi_half") = 2.0);

    m.def("config_hash", [](const std::string& text) { return io::config_hash(io::json::parse(text)); });
}
