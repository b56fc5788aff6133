#pragma once

#include "fbd/experiments.hpp"
#include "fbd/integrator.hpp"
#include "fbd/macro_limit.hpp"
#include "fbd/single_interface.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

namespace fbd::io {

using json = nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// 17 significant digits, enough to round-trip a double.
std::string format_double(double v);

class CsvWriter {
public:
    // Throws ConfigError when the file cannot be opened.
    CsvWriter(const std::filesystem::path& path, std::initializer_list<const char*> header);
    void row(std::initializer_list<double> values);

private:
    std::ofstream out_;
    std::size_t columns_;
};

// tau,xi,u,p per site and snapshot.
void write_snapshots(const std::filesystem::path& path, const Trajectory& traj, const Potential& pot, double eps);
void write_snapshots(const std::filesystem::path& path, const std::vector<si::SingleInterfaceState>& snaps,
                     double eps);
// tau,xi_star; one row per interface and snapshot.
void write_interface(const std::filesystem::path& path, const Vec& tau, const std::vector<Vec>& xi_star);
// k,t_star,tau_star,u_left,jump
void write_events(const std::filesystem::path& path, const si::TransitionLog& log, double eps);
// t,tau,residual
void write_decomposition(const std::filesystem::path& path, const si::Decomposition& dec, double eps);
// t,energy,dissipation
void write_energy(const std::filesystem::path& path, const Trajectory& traj);
// tau,xi,P,U for the limit solve, and tau,xi_star.
void write_macro_fields(const std::filesystem::path& path, const macro::MacroSolution& sol);
void write_xi_star(const std::filesystem::path& path, const macro::MacroSolution& sol);

// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const json& config);

// {config_hash, seed, versions, command, extra...}
json metadata(const json& config, const std::string& command, std::uint64_t seed = 0);
void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

json to_json(const experiments::ExperimentResult& r);

} // namespace fbd::io
