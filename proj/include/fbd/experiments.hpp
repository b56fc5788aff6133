#pragma once

#include "fbd/integrator.hpp"
#include "fbd/lattice.hpp"
#include "fbd/potential.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fbd::experiments {

// Phase label per site (+1 at or above the spinodal midpoint, -1 below),
// smoothed by a running median over `window` sites (odd).
std::vector<int> phase_labels(const Vec& u, const Potential& pot, int window = 5);

// Macroscopic positions eps (j + 1/2) of label changes, left to right.
Vec interface_positions(const Vec& u, long first_index, double eps, const Potential& pot, int window = 5);

// Running median over `window` samples (odd), shrinking at the ends.
Vec running_median(const Vec& x, int window);

// max_j dist(u_j, {beta_-(p_j), beta_+(p_j)}) over sites with xi in [xi_lo, xi_hi];
// a missing branch counts as infinite distance.
double two_point_support_distance(const Vec& u, long first_index, double eps, const Potential& pot, double xi_lo,
                                  double xi_hi);

// Largest distance by which any u_j lies inside (u_*, u^*), 0 if none does.
double spinodal_penetration(const Vec& u, const Potential& pot);

struct PresetParams {
    long N = 50;
    double tau_end = 0.002;
    double dt0 = 0.0;           // 0: stability_dt of the potential
    std::size_t energy_stride = 50;
    Vec snapshot_taus;          // empty: tau_end * n / 200
    std::uint64_t seed = 12345;
    std::map<std::string, double> shape;  // profile parameters, see preset_params()
};

// Defaults for transient-two-phase, transient-spinodal, annihilation,
// pinning, depinning and type-II. ConfigError for other names.
PresetParams preset_params(const std::string& name);
const std::vector<std::string>& preset_names();

// Initial data on j = -N..N with Neumann ends, eps = 1/N.
LatticeState preset_initial(const std::string& name, const PresetParams& params, const Potential& pot);

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::string detail;
};

struct ExperimentResult {
    std::string name;
    PresetParams params;
    double eps = 0.0;
    LatticeState initial;
    Trajectory traj;
    Vec tau;                           // snapshot times
    std::vector<Vec> interfaces;       // per snapshot
    std::map<std::string, double> metrics;
    std::vector<Check> checks;
    bool passed() const;
};

ExperimentResult general_phi_experiment(const std::string& name, const PresetParams& params);
inline ExperimentResult general_phi_experiment(const std::string& name)
{
    return general_phi_experiment(name, preset_params(name));
}

} // namespace fbd::experiments
