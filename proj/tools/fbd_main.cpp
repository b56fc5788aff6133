// fbd: command line front end. Every subcommand writes into --out and leaves a
// metadata.json next to its data files.

#include "fbd/config.hpp"
#include "fbd/errors.hpp"
#include "fbd/experiments.hpp"
#include "fbd/heat_kernel.hpp"
#include "fbd/io.hpp"
#include "fbd/macro_limit.hpp"
#include "fbd/scaling.hpp"
#include "fbd/single_interface.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using fbd::io::json;
using namespace fbd;

namespace {

json load_config(const std::string& path)
{
    return path.empty() ? json::object() : io::read_json(path);
}

fs::path prepare_out(const std::string& out)
{
    fs::path p(out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw ConfigError("cannot create output directory " + out + ": " + ec.message());
    return p;
}

Vec snapshot_taus(double tau_end, int n)
{
    Vec v;
    for (int i = 0; i <= n; ++i) v.push_back(tau_end * i / n);
    return v;
}

int output_snapshots(const json& cfg, int fallback)
{
    const json& out = config::section(cfg, "output");
    config::check_keys(out, "output", {"dir", "n_snapshots"});
    int n = config::get_or(out, "n_snapshots", fallback);
    if (n < 1) throw ConfigError("config: output.n_snapshots must be positive");
    return n;
}

double initial_get(const json& cfg, const char* key, double fallback)
{
    return config::get_or(config::section(cfg, "initial_data"), key, fallback);
}

int cmd_simulate(const std::string& cfg_path, const std::string& out)
{
    json cfg = load_config(cfg_path);
    Potential pot = config::potential_from_json(cfg);
    LatticeState init = config::lattice_from_json(cfg);
    const double eps = initial_get(cfg, "eps", 1.0);
    Bounds b = comparison_bounds(init, pot);
    EulerConfig base;
    base.dt0 = stability_dt(pot, b.lower, b.upper);
    base.dt_min = 1e-12 * base.dt0;
    base.t_end = 10.0;
    EulerConfig ec = config::euler_from_json(cfg, base);
    int n = config::get_or(config::section(cfg, "integrator"), "n_snapshots", output_snapshots(cfg, 20));
    ec.snapshot_times = snapshot_taus(ec.t_end * eps * eps, n);
    Trajectory traj = run(init, pot, ec, eps);

    fs::path dir = prepare_out(out);
    io::write_snapshots(dir / "snapshots.csv", traj, pot, eps);
    io::write_energy(dir / "energy.csv", traj);
    Vec tau;
    std::vector<Vec> xs;
    for (const auto& s : traj.snapshots) {
        tau.push_back(s.t * eps * eps);
        xs.push_back(experiments::interface_positions(s.u, traj.first_index, eps, pot));
    }
    io::write_interface(dir / "interface.csv", tau, xs);
    json summary = {{"accepted", traj.accepted}, {"rejected", traj.rejected}, {"stationary", traj.stationary},
                    {"mass_drift", traj.mass_drift}, {"final_energy", traj.energies.back().second}};
    io::write_json(dir / "summary.json", summary);
    io::write_json(dir / "metadata.json", io::metadata(cfg, "simulate"));
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int cmd_single_interface(const std::string& cfg_path, const std::string& out)
{
    json cfg = load_config(cfg_path);
    auto profile = config::profile_from_json(cfg);
    const double eps = initial_get(cfg, "eps", 0.05);
    const double tau_end = initial_get(cfg, "tau_end", 0.2);
    const int n = output_snapshots(cfg, 20);
    auto r = scaling::run_scaled(profile, eps, tau_end, n);
    kernel::KernelEvaluator kern;
    auto dec = si::decompose(r.run, r.data.p0, kern);
    auto chk = si::check_log(r.run.log);

    fs::path dir = prepare_out(out);
    io::write_events(dir / "events.csv", r.run.log, eps);
    io::write_snapshots(dir / "snapshots.csv", r.run.snapshots, eps);
    io::write_decomposition(dir / "decomposition_residuals.csv", dec, eps);
    Vec tau;
    std::vector<Vec> xs;
    for (const auto& s : r.run.snapshots) {
        tau.push_back(s.t * eps * eps);
        xs.push_back({eps * double(s.k - 1)});
    }
    io::write_interface(dir / "interface.csv", tau, xs);
    json summary = {{"eps", eps},
                    {"c_eps", r.data.c_eps},
                    {"alpha", r.data.alpha},
                    {"beta", r.data.beta},
                    {"events", r.run.log.events.size()},
                    {"window", r.data.state.u.size()},
                    {"boundary_effect", r.run.boundary_effect},
                    {"max_decomposition_residual", dec.max_residual},
                    {"min_u_left_margin", chk.min_u_left_margin},
                    {"max_jump_error", chk.max_jump_error},
                    {"sequential", chk.sequential},
                    {"log_ok", chk.ok()}};
    io::write_json(dir / "summary.json", summary);
    io::write_json(dir / "metadata.json", io::metadata(cfg, "single-interface"));
    std::cout << summary.dump(2) << '\n';
    return chk.ok() ? 0 : 2;
}

json kernel_report(const std::string& which, double t_max, kernel::Method method)
{
    kernel::KernelEvaluator kern(method);
    kernel::KernelEvaluator other(method == kernel::Method::bessel_series ? kernel::Method::fourier_quadrature
                                                                          : kernel::Method::bessel_series);
    auto grid = kernel::standard_t_grid(t_max);
    json rep = {{"method", kernel::to_string(method)}, {"t_max", t_max}, {"grid_points", grid.size()}};
    bool all = which == "all";
    if (all || which == "monotonicity") {
        auto m = kernel::verify_monotonicity(kern, grid);
        rep["monotonicity"] = {{"violations", m.violations}, {"max_violation", m.max_violation}, {"worst", m.worst}};
    }
    if (all || which == "decay") {
        auto d = kernel::verify_decay(kern, grid, -100, 100);
        json trunc = json::object();
        for (auto [t, J] : d.truncation) trunc[io::format_double(t)] = J;
        rep["decay"] = {{"violations", d.violations},        {"max_violation", d.max_violation},
                        {"c", d.fitted_c},                   {"C", d.fitted_C},
                        {"C_g", d.fitted_C_g},               {"C_dot", d.fitted_C_dot},
                        {"C_grad", d.fitted_C_grad},         {"max_conservation_error", d.max_conservation_error},
                        {"truncation", trunc}};
    }
    if (all || which == "holder") {
        Vec coarse = kernel::standard_t_grid(t_max, 4);
        auto h = kernel::verify_holder(kern, coarse, -30, 30);
        json cg = json::object(), cb = json::object();
        for (auto [g, c] : h.C_gamma) cg[io::format_double(g)] = c;
        for (auto [g, c] : h.C_gamma_bound) cb[io::format_double(g)] = c;
        rep["holder"] = {{"violations", h.violations}, {"max_violation", h.max_violation},
                         {"C_gamma", cg},              {"C_gamma_bound", cb},
                         {"C_spatial", h.C_spatial},   {"C_spatial_bound", h.C_spatial_bound},
                         {"pairs", h.pairs}};
    }
    if (all || which == "paths") {
        double worst = 0.0;
        for (double t : {0.01, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4}) {
            if (t > t_max) continue;
            auto a = kern.row(t, 50);
            auto b = other.row(t, 50);
            for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
        }
        double g0 = kern.g(0, t_max);
        rep["paths"] = {{"max_difference", worst},
                        {"asymptotic_ratio", std::sqrt(t_max) * g0 * 2.0 * std::sqrt(M_PI)}};
    }
    if (rep.size() == 3) throw ConfigError("kernel: unknown verifier '" + which + "'");
    return rep;
}

int cmd_kernel(const std::string& which, double t_max, const std::string& method, const std::string& out)
{
    kernel::Method m = method == "fourier" ? kernel::Method::fourier_quadrature : kernel::Method::bessel_series;
    if (method != "fourier" && method != "bessel") throw ConfigError("kernel: method must be fourier or bessel");
    json rep = kernel_report(which, t_max, m);
    if (!out.empty()) io::write_json(out, rep);
    std::cout << rep.dump(2) << '\n';
    std::size_t v = 0;
    for (const char* k : {"monotonicity", "decay", "holder"})
        if (rep.contains(k)) v += rep[k]["violations"].get<std::size_t>();
    return v == 0 ? 0 : 2;
}

struct LimitSetup {
    double dxi = 1e-3;
    double xi_half = 3.0;
    int n_out = 200;
};

LimitSetup limit_setup(const json& cfg, double dxi_default)
{
    const json& g = config::section(cfg, "grids");
    config::check_keys(g, "grids", {"dxi", "dxi_list", "xi_half", "n_out"});
    LimitSetup s;
    s.dxi = config::get_or(g, "dxi", dxi_default);
    s.xi_half = config::get_or(g, "xi_half", s.xi_half);
    s.n_out = config::get_or(g, "n_out", s.n_out);
    return s;
}

int cmd_limit(const std::string& cfg_path, const std::string& out)
{
    json cfg = load_config(cfg_path);
    auto profile = config::profile_from_json(cfg);
    const double tau_end = initial_get(cfg, "tau_end", 0.2);
    auto ls = limit_setup(cfg, 1e-2);
    auto sol = scaling::solve_limit(profile, tau_end, ls.dxi, ls.xi_half, ls.n_out);

    fs::path dir = prepare_out(out);
    io::write_macro_fields(dir / "P_snapshots.csv", sol);
    io::write_xi_star(dir / "xi_star.csv", sol);
    auto stefan = macro::stefan_residual(sol);
    {
        io::CsvWriter w(dir / "residuals.csv", {"tau", "stefan_residual"});
        for (std::size_t n = 0; n < stefan.size(); ++n) w.row({sol.trace.tau[n], stefan[n]});
    }
    json summary = {{"dxi", ls.dxi},
                    {"relay_advances", sol.relay_advances},
                    {"max_conservation_error", sol.max_conservation_error},
                    {"stefan_residual_mean", macro::stefan_residual_mean(sol, 0.1 * tau_end, tau_end)},
                    {"distributional_residual",
                     macro::distributional_residual(sol, macro::default_test_functions(sol))},
                    {"min_P", sol.min_P},
                    {"max_P_right", sol.max_P_right},
                    {"xi_star_final", sol.xi_star.back()}};
    io::write_json(dir / "summary.json", summary);
    io::write_json(dir / "metadata.json", io::metadata(cfg, "limit"));
    std::cout << summary.dump(2) << '\n';
    return 0;
}

scaling::ProfileSpec sweep_profile(const json& cfg)
{
    if (config::section(cfg, "initial_data").contains("profile")) return config::profile_from_json(cfg);
    return scaling::ProfileSpec::sweep();
}

json sweep_json(const scaling::SweepResult& sw)
{
    json entries = json::array();
    for (std::size_t i = 0; i < sw.runs.size(); ++i) {
        json e = {{"eps", sw.runs[i].eps},
                  {"K", sw.gaps.entries[i].K},
                  {"min_scaled_gap", sw.gaps.entries[i].min_scaled_gap},
                  {"K_eps", sw.gaps.entries[i].K_eps},
                  {"alpha", sw.runs[i].data.alpha},
                  {"beta", sw.runs[i].data.beta},
                  {"max_decomposition_residual", sw.embeddings[i].max_decomposition_residual},
                  {"regular_bound_violations", sw.bounds[i].violations}};
        if (!sw.splits.empty()) {
            const auto& s = sw.splits[i];
            e["sup_R2"] = s.sup_R2;
            e["R2_L1"] = s.R2_L1;
            e["R2_outside"] = s.R2_outside;
            e["R1_L1_sup"] = s.R1_L1_sup;
            e["gradR1_L2_sup"] = s.gradR1_L2_sup;
            e["interface_condition"] = s.interface_condition;
            e["xi_lipschitz"] = sw.holder[i].xi_lipschitz;
            e["Q_time_holder"] = sw.holder[i].Q_time;
            e["Q_space_lipschitz"] = sw.holder[i].Q_space;
        }
        entries.push_back(e);
    }
    return {{"tau_end", sw.tau_end},
            {"profile", {{"kind", scaling::to_string(sw.profile.kind)}, {"a", sw.profile.a}, {"b", sw.profile.b},
                         {"ell", sw.profile.ell}}},
            {"d_star", sw.gaps.d_star},
            {"d_split", sw.d_split},
            {"gap_variation", sw.gaps.variation},
            {"K_bound_ok", sw.gaps.K_bound_ok},
            {"R2_L1_slope", sw.R2_L1_slope},
            {"R1_L1_ratio", sw.R1_L1_ratio},
            {"gradR1_L2_ratio", sw.gradR1_L2_ratio},
            {"seconds", sw.seconds},
            {"entries", entries}};
}

void write_sweep_events(const fs::path& dir, const scaling::SweepResult& sw)
{
    for (const auto& r : sw.runs) {
        char name[64];
        std::snprintf(name, sizeof name, "events_eps%g.csv", r.eps);
        io::write_events(dir / name, r.run.log, r.eps);
    }
}

int cmd_sweep(const std::string& cfg_path, const std::string& out)
{
    json cfg = load_config(cfg_path);
    auto profile = sweep_profile(cfg);
    auto eps = config::eps_list_from_json(cfg);
    const double tau_end = initial_get(cfg, "tau_end", 0.3);
    kernel::KernelEvaluator kern;
    auto sw = scaling::run_sweep(profile, eps, tau_end, kern, output_snapshots(cfg, 100));
    fs::path dir = prepare_out(out);
    json rep = sweep_json(sw);
    write_sweep_events(dir, sw);
    io::write_json(dir / "sweep.json", rep);
    io::write_json(dir / "metadata.json", io::metadata(cfg, "sweep"));
    std::cout << rep.dump(2) << '\n';
    return 0;
}

int cmd_compare(const std::string& cfg_path, const std::string& out)
{
    json cfg = load_config(cfg_path);
    auto profile = sweep_profile(cfg);
    auto eps = config::eps_list_from_json(cfg);
    const double tau_end = initial_get(cfg, "tau_end", 0.3);
    auto ls = limit_setup(cfg, 1e-3);
    kernel::KernelEvaluator kern;
    auto sw = scaling::run_sweep(profile, eps, tau_end, kern, output_snapshots(cfg, 100));
    auto lim = scaling::solve_limit(profile, tau_end, ls.dxi, ls.xi_half, ls.n_out);
    auto cmp = scaling::compare_to_limit(sw.embeddings, sw.splits, lim);

    fs::path dir = prepare_out(out);
    write_sweep_events(dir, sw);
    io::write_xi_star(dir / "xi_star_limit.csv", lim);
    {
        io::CsvWriter w(dir / "interface.csv", {"eps", "tau", "xi_star"});
        for (const auto& e : sw.embeddings)
            for (double t : e.tau) w.row({e.eps, t, e.xi_star(t)});
    }
    json rep = {{"sweep", sweep_json(sw)},
                {"limit_dxi", ls.dxi},
                {"eps", cmp.eps},
                {"xi_error", cmp.xi_error},
                {"P_error", cmp.P_error},
                {"min_P", cmp.min_P},
                {"max_P_right", cmp.max_P_right},
                {"monotone", cmp.monotone}};
    io::write_json(dir / "compare.json", rep);
    io::write_json(dir / "metadata.json", io::metadata(cfg, "compare"));
    std::cout << rep.dump(2) << '\n';
    return 0;
}

int cmd_preset(const std::string& name, const std::string& out, long N, std::int64_t seed, double tau_end)
{
    auto params = experiments::preset_params(name);
    if (N > 0) params.N = N;
    if (seed >= 0) params.seed = std::uint64_t(seed);
    if (tau_end > 0.0) params.tau_end = tau_end;
    auto res = experiments::general_phi_experiment(name, params);
    const Potential pot = Potential::smooth_demo();

    fs::path dir = prepare_out(out);
    io::write_snapshots(dir / "snapshots.csv", res.traj, pot, res.eps);
    io::write_interface(dir / "interface.csv", res.tau, res.interfaces);
    io::write_energy(dir / "energy.csv", res.traj);
    json rep = io::to_json(res);
    io::write_json(dir / "checks.json", rep);
    json cfg = {{"preset", name}, {"N", params.N}, {"tau_end", params.tau_end}, {"shape", params.shape}};
    io::write_json(dir / "metadata.json", io::metadata(cfg, "preset", params.seed));
    for (const auto& c : res.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << io::format_double(c.value)
                  << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
    return res.passed() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Forward-backward diffusion lattices and their free boundary limit"};
    app.require_subcommand(1);
    std::string cfg, out = "out";

    auto* sim = app.add_subcommand("simulate", "guarded Euler run for a general potential");
    auto* single = app.add_subcommand("single-interface", "event-driven piecewise-quadratic run");
    auto* kern = app.add_subcommand("kernel", "discrete heat kernel verification report");
    auto* lim = app.add_subcommand("limit", "macroscopic free boundary solve");
    auto* sweep = app.add_subcommand("sweep", "eps sweep with gap and R-split diagnostics");
    auto* cmp = app.add_subcommand("compare", "eps sweep against the limit solve");
    auto* pre = app.add_subcommand("preset", "smooth-potential experiment preset");
    for (auto* sc : {sim, single, lim, sweep, cmp}) {
        sc->add_option("--config", cfg, "JSON config")->check(CLI::ExistingFile);
        sc->add_option("--out", out, "output directory");
    }
    sim->get_option("--config")->required();

    std::string verify = "all", method = "bessel", report;
    double t_max = 1e4;
    kern->add_option("--verify", verify, "all | monotonicity | decay | holder | paths");
    kern->add_option("--t-max", t_max, "largest time on the grid");
    kern->add_option("--method", method, "bessel | fourier");
    kern->add_option("--out", report, "report path");

    std::string preset;
    long N = 0;
    std::int64_t seed = -1;
    double tau_end = 0.0;
    pre->add_option("name", preset, "preset name")->required()->check(CLI::IsMember(experiments::preset_names()));
    pre->add_option("--out", out, "output directory");
    pre->add_option("--N", N, "lattice half-width");
    pre->add_option("--seed", seed, "generator seed");
    pre->add_option("--tau-end", tau_end, "macroscopic horizon");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*sim) return cmd_simulate(cfg, out);
        if (*single) return cmd_single_interface(cfg, out);
        if (*kern) return cmd_kernel(verify, t_max, method, report);
        if (*lim) return cmd_limit(cfg, out);
        if (*sweep) return cmd_sweep(cfg, out);
        if (*cmp) return cmd_compare(cfg, out);
        if (*pre) return cmd_preset(preset, out, N, seed, tau_end);
    } catch (const fbd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const fbd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
