#include "fbd/io.hpp"

#include "fbd/errors.hpp"

#include <cstdio>

namespace fbd::io {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> header)
    : out_(path), columns_(header.size())
{
    if (!out_) throw ConfigError("cannot open " + path.string() + " for writing");
    bool first = true;
    for (const char* h : header) {
        out_ << (first ? "" : ",") << h;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values)
{
    if (values.size() != columns_) throw InvalidStateError("csv row width does not match the header");
    bool first = true;
    for (double v : values) {
        out_ << (first ? "" : ",") << format_double(v);
        first = false;
    }
    out_ << '\n';
}

void write_snapshots(const std::filesystem::path& path, const Trajectory& traj, const Potential& pot, double eps)
{
    CsvWriter w(path, {"tau", "xi", "u", "p"});
    for (const auto& s : traj.snapshots)
        for (std::size_t i = 0; i < s.u.size(); ++i)
            w.row({s.t * eps * eps, eps * double(traj.first_index + long(i)), s.u[i], pot.dphi(s.u[i])});
}

void write_snapshots(const std::filesystem::path& path, const std::vector<si::SingleInterfaceState>& snaps,
                     double eps)
{
    CsvWriter w(path, {"tau", "xi", "u", "p"});
    for (const auto& s : snaps) {
        Vec p = si::p_from_u(s.u);
        for (std::size_t i = 0; i < s.u.size(); ++i)
            w.row({s.t * eps * eps, eps * double(s.first_index + long(i)), s.u[i], p[i]});
    }
}

void write_interface(const std::filesystem::path& path, const Vec& tau, const std::vector<Vec>& xi_star)
{
    CsvWriter w(path, {"tau", "xi_star"});
    for (std::size_t n = 0; n < tau.size() && n < xi_star.size(); ++n)
        for (double x : xi_star[n]) w.row({tau[n], x});
}

void write_events(const std::filesystem::path& path, const si::TransitionLog& log, double eps)
{
    CsvWriter w(path, {"k", "t_star", "tau_star", "u_left", "jump"});
    for (const auto& e : log.events) w.row({double(e.k), e.t_star, e.t_star * eps * eps, e.u_left, e.jump()});
}

void write_decomposition(const std::filesystem::path& path, const si::Decomposition& dec, double eps)
{
    CsvWriter w(path, {"t", "tau", "residual"});
    for (std::size_t n = 0; n < dec.times.size(); ++n) w.row({dec.times[n], dec.times[n] * eps * eps, dec.residual[n]});
}

void write_energy(const std::filesystem::path& path, const Trajectory& traj)
{
    CsvWriter w(path, {"t", "energy", "dissipation"});
    for (std::size_t n = 0; n < traj.energies.size(); ++n)
        w.row({traj.energies[n].first, traj.energies[n].second, traj.dissipations[n].second});
}

void write_macro_fields(const std::filesystem::path& path, const macro::MacroSolution& sol)
{
    CsvWriter w(path, {"tau", "xi", "P", "U"});
    for (std::size_t n = 0; n < sol.tau_grid.size(); ++n)
        for (std::size_t i = 0; i < sol.xi_grid.size(); ++i) w.row({sol.tau_grid[n], sol.xi_grid[i], sol.P[n][i], sol.U[n][i]});
}

void write_xi_star(const std::filesystem::path& path, const macro::MacroSolution& sol)
{
    CsvWriter w(path, {"tau", "xi_star"});
    for (std::size_t n = 0; n < sol.tau_grid.size(); ++n) w.row({sol.tau_grid[n], sol.xi_star[n]});
}

std::string config_hash(const json& config)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json metadata(const json& config, const std::string& command, std::uint64_t seed)
{
    return {{"command", command},
            {"config_hash", config_hash(config)},
            {"seed", seed},
            {"versions",
             {{"fbd", kVersion},
              {"kernel", "fourier+bessel-1"},
              {"single_interface", "spectral-events-1"},
              {"integrator", "guarded-euler-1"},
              {"macro", "relay-explicit-1"}}},
            {"config", config}};
}

void write_json(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

json to_json(const experiments::ExperimentResult& r)
{
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
    return {{"preset", r.name},
            {"N", r.params.N},
            {"eps", r.eps},
            {"tau_end", r.params.tau_end},
            {"seed", r.params.seed},
            {"shape", r.params.shape},
            {"metrics", r.metrics},
            {"checks", checks},
            {"passed", r.passed()}};
}

} // namespace fbd::io
