#pragma once

#include "fbd/errors.hpp"
#include "fbd/integrator.hpp"
#include "fbd/lattice.hpp"
#include "fbd/macro_limit.hpp"
#include "fbd/potential.hpp"
#include "fbd/scaling.hpp"

#include <json.hpp>

#include <string>

namespace fbd::config {

using json = nlohmann::json;

// Sections of the run document; each is optional and unknown keys are a
// ConfigError so that typos do not silently fall back to defaults.
//   potential:    {kind: smooth-demo | piecewise-quadratic}
//   initial_data: {profile, a, b, ell, offset, eps, tau_end}            (scaled runs)
//                 {values, first_index, bc, left, right, eps}           (simulate)
//                 {preset, N, seed, tau_end, shape}                     (simulate)
//   integrator:   {dt0, dt_min, energy_guard, safety, growth, t_end, energy_stride, n_snapshots}
//   eps_list:     [eps, ...]
//   grids:        {dxi, dxi_list, xi_half, cfl, n_out}
//   output:       {dir, n_snapshots}
void check_keys(const json& section, const std::string& name, std::initializer_list<const char*> allowed);

Potential potential_from_json(const json& doc);
scaling::ProfileSpec profile_from_json(const json& doc);
EulerConfig euler_from_json(const json& doc, const EulerConfig& base = {});
Vec eps_list_from_json(const json& doc, const Vec& fallback = {0.1, 0.05, 0.02, 0.01});
BoundaryCondition bc_from_json(const json& section);
// Explicit lattice data from initial_data.values.
LatticeState lattice_from_json(const json& doc);

template <class T>
T get_or(const json& section, const char* key, T fallback)
{
    if (!section.is_object() || !section.contains(key)) return fallback;
    try {
        return section.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

const json& section(const json& doc, const char* name);

} // namespace fbd::config
