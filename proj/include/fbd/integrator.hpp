#pragma once

#include "fbd/lattice.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace fbd {

struct EulerConfig {
    double dt0 = 0.1;
    double dt_min = 1e-12;
    bool energy_guard = true;
    double safety = 0.5;
    double growth = 1.25;  // accepted steps multiply dt by this, capped at dt0
    double t_end = 1.0;
    std::vector<double> snapshot_times;  // macroscopic tau, converted with t = tau / eps^2
    std::size_t energy_stride = 1;       // record every n-th accepted step

    void validate() const;
};

struct Snapshot {
    double t = 0.0;
    Vec u;
};

struct Trajectory {
    long first_index = 0;
    BoundaryCondition bc;
    std::vector<Snapshot> snapshots;
    std::vector<std::pair<double, double>> energies;
    std::vector<std::pair<double, double>> dissipations;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t stationary = 0;  // accepted with |dE| within round-off of E
    double mass_drift = 0.0;       // max |sum u(t) - sum u(0)| over accepted steps
};

LatticeState euler_step(const LatticeState& state, const Potential& pot, double dt);

// Called after each accepted step.
using StepObserver = std::function<void(const LatticeState&)>;

Trajectory run(const LatticeState& initial, const Potential& pot, const EulerConfig& cfg, double eps,
               const StepObserver& observer = {});

// 1/(2 sup|Phi''|) over [lo, hi]; 1/4 for the piecewise-quadratic potential.
double stability_dt(const Potential& pot, double lo, double hi);

} // namespace fbd
