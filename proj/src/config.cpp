#include "fbd/config.hpp"

#include "fbd/errors.hpp"

#include <algorithm>

namespace fbd::config {

const json& section(const json& doc, const char* name)
{
    static const json empty = json::object();
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    if (!doc.contains(name)) return empty;
    const json& s = doc.at(name);
    if (!s.is_object()) throw ConfigError(std::string("config: section '") + name + "' must be an object");
    return s;
}

void check_keys(const json& s, const std::string& name, std::initializer_list<const char*> allowed)
{
    for (auto it = s.begin(); it != s.end(); ++it)
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
            throw ConfigError("config: unknown key '" + it.key() + "' in section '" + name + "'");
}

Potential potential_from_json(const json& doc)
{
    const json& s = section(doc, "potential");
    check_keys(s, "potential", {"kind"});
    auto kind = get_or<std::string>(s, "kind", "piecewise-quadratic");
    if (kind == "piecewise-quadratic") return Potential::piecewise_quadratic();
    if (kind == "smooth-demo") return Potential::smooth_demo();
    if (kind == "custom") throw ConfigError("config: custom potentials are only available through the library API");
    throw ConfigError("config: unknown potential kind '" + kind + "'");
}

scaling::ProfileSpec profile_from_json(const json& doc)
{
    const json& s = section(doc, "initial_data");
    check_keys(s, "initial_data", {"profile", "a", "b", "ell", "offset", "eps", "tau_end"});
    auto name = get_or<std::string>(s, "profile", "exp-kink");
    auto kind = scaling::profile_kind_from_string(name);
    if (kind == scaling::ProfileSpec::Kind::custom)
        throw ConfigError("config: custom profiles are only available through the library API");
    scaling::ProfileSpec p = kind == scaling::ProfileSpec::Kind::standing ? scaling::ProfileSpec::standing_default()
                                                                          : scaling::ProfileSpec::reference();
    p.a = get_or(s, "a", p.a);
    p.b = get_or(s, "b", p.b);
    p.ell = get_or(s, "ell", p.ell);
    p.offset = get_or(s, "offset", p.offset);
    p.validate();
    return p;
}

EulerConfig euler_from_json(const json& doc, const EulerConfig& base)
{
    const json& s = section(doc, "integrator");
    check_keys(s, "integrator",
               {"dt0", "dt_min", "energy_guard", "safety", "growth", "t_end", "energy_stride", "n_snapshots"});
    EulerConfig c = base;
    c.dt0 = get_or(s, "dt0", c.dt0);
    c.dt_min = get_or(s, "dt_min", c.dt_min);
    c.energy_guard = get_or(s, "energy_guard", c.energy_guard);
    c.safety = get_or(s, "safety", c.safety);
    c.growth = get_or(s, "growth", c.growth);
    c.t_end = get_or(s, "t_end", c.t_end);
    c.energy_stride = get_or<std::size_t>(s, "energy_stride", c.energy_stride);
    c.validate();
    return c;
}

Vec eps_list_from_json(const json& doc, const Vec& fallback)
{
    if (!doc.contains("eps_list")) return fallback;
    Vec v;
    try {
        v = doc.at("eps_list").get<Vec>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: eps_list: ") + e.what());
    }
    if (v.empty()) throw ConfigError("config: eps_list is empty");
    for (double e : v)
        if (!(e > 0.0 && e <= 1.0)) throw ConfigError("config: eps values must lie in (0, 1]");
    return v;
}

BoundaryCondition bc_from_json(const json& s)
{
    auto kind = get_or<std::string>(s, "bc", "neumann");
    if (kind == "neumann") return BoundaryCondition::neumann();
    if (kind == "window") return BoundaryCondition::window();
    if (kind == "dirichlet") return BoundaryCondition::dirichlet(get_or(s, "left", 0.0), get_or(s, "right", 0.0));
    throw ConfigError("config: unknown bc '" + kind + "'");
}

LatticeState lattice_from_json(const json& doc)
{
    const json& s = section(doc, "initial_data");
    check_keys(s, "initial_data", {"values", "first_index", "bc", "left", "right", "eps"});
    if (!s.contains("values")) throw ConfigError("config: initial_data.values is required");
    LatticeState st;
    st.u = get_or<Vec>(s, "values", {});
    st.first_index = get_or<long>(s, "first_index", 0);
    st.bc = bc_from_json(s);
    try {
        st.validate();
    } catch (const InvalidStateError& e) {
        throw ConfigError(std::string("config: initial_data: ") + e.what());
    }
    return st;
}

} // namespace fbd::config
