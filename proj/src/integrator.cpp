#include "fbd/integrator.hpp"

#include "fbd/errors.hpp"

#include <algorithm>
#include <cmath>

namespace fbd {

void EulerConfig::validate() const
{
    if (!(dt_min > 0.0 && dt_min <= dt0)) throw ConfigError("euler: need 0 < dt_min <= dt0");
    if (!(safety > 0.0 && safety < 1.0)) throw ConfigError("euler: safety must lie in (0,1)");
    if (!(growth >= 1.0)) throw ConfigError("euler: growth must be >= 1");
    if (!(t_end >= 0.0)) throw ConfigError("euler: negative horizon");
    if (energy_stride == 0) throw ConfigError("euler: energy_stride must be positive");
}

LatticeState euler_step(const LatticeState& state, const Potential& pot, double dt)
{
    if (dt < 0.0) throw DomainError("euler_step: negative dt");
    LatticeState next = state;
    next.t = state.t + dt;
    if (dt == 0.0) return next;
    Vec f = rhs(state, pot);
    for (std::size_t j = 0; j < f.size(); ++j) {
        next.u[j] += dt * f[j];
        if (!std::isfinite(next.u[j]))
            throw NumericalOverflowError("euler_step: non-finite value at site " +
                                         std::to_string(state.first_index + long(j)) + " with dt=" + std::to_string(dt));
    }
    return next;
}

Trajectory run(const LatticeState& initial, const Potential& pot, const EulerConfig& cfg, double eps,
               const StepObserver& observer)
{
    if (!(eps > 0.0)) throw DomainError("run: eps must be positive");
    cfg.validate();
    initial.validate();

    std::vector<double> stops;
    for (double tau : cfg.snapshot_times) {
        double t = tau / (eps * eps);
        if (t < initial.t - 1e-12 || t > cfg.t_end + 1e-9)
            throw ConfigError("run: snapshot time tau=" + std::to_string(tau) + " outside the horizon");
        stops.push_back(std::clamp(t, initial.t, cfg.t_end));
    }
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    Trajectory traj;
    traj.first_index = initial.first_index;
    traj.bc = initial.bc;

    LatticeState s = initial;
    const double mass0 = sum(s.u);
    double e = energy(s, pot, eps);
    traj.energies.emplace_back(s.t, e);
    traj.dissipations.emplace_back(s.t, dissipation(s, pot, eps));

    std::size_t next_stop = 0;
    auto take_snapshots = [&] {
        while (next_stop < stops.size() && stops[next_stop] <= s.t) {
            traj.snapshots.push_back({stops[next_stop], s.u});
            ++next_stop;
        }
    };
    take_snapshots();

    double dt = cfg.dt0;
    while (s.t < cfg.t_end) {
        double target = next_stop < stops.size() ? stops[next_stop] : cfg.t_end;
        double h = std::min(dt, target - s.t);
        // Stretch by round-off instead of leaving a sliver step before a stop.
        if (target - s.t - h <= 1e-9 * h) h = target - s.t;
        bool lands = h >= target - s.t;

        LatticeState cand;
        double e_new = 0.0;
        bool ok = true;
        try {
            cand = euler_step(s, pot, h);
            if (cfg.energy_guard) {
                e_new = energy(cand, pot, eps);
                ok = e_new <= e + 1e-14 * std::abs(e);
            }
        } catch (const NumericalOverflowError&) {
            if (!cfg.energy_guard) throw;
            ok = false;
        }
        if (!ok) {
            ++traj.rejected;
            dt = h * cfg.safety;
            if (dt < cfg.dt_min) {
                throw GuardFailureError("run: dt fell below dt_min=" + std::to_string(cfg.dt_min) + " at t=" +
                                        std::to_string(s.t) + ", E=" + std::to_string(e) +
                                        ", rejected candidate E=" + std::to_string(e_new));
            }
            continue;
        }

        if (lands) cand.t = target;
        if (!cfg.energy_guard) e_new = energy(cand, pot, eps);
        if (!(e_new < e)) ++traj.stationary;
        s = std::move(cand);
        e = e_new;
        ++traj.accepted;
        traj.mass_drift = std::max(traj.mass_drift, std::abs(sum(s.u) - mass0));
        if (traj.accepted % cfg.energy_stride == 0 || s.t >= cfg.t_end) {
            traj.energies.emplace_back(s.t, e);
            traj.dissipations.emplace_back(s.t, dissipation(s, pot, eps));
        }
        if (observer) observer(s);
        take_snapshots();
        if (h == dt) dt = std::min(cfg.dt0, dt * cfg.growth);
    }
    return traj;
}

double stability_dt(const Potential& pot, double lo, double hi)
{
    if (pot.kind() == PotentialKind::piecewise_quadratic) return 0.25;
    double l = pot.max_curvature(lo, hi);
    if (!(l > 0.0)) throw DomainError("stability_dt: vanishing curvature bound");
    return 1.0 / (2.0 * l);
}

} // namespace fbd
