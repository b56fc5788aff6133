#pragma once

#include "fbd/heat_kernel.hpp"
#include "fbd/lattice.hpp"
#include "fbd/macro_limit.hpp"
#include "fbd/single_interface.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fbd::scaling {

// Macroscopic profile with a single kink at xi = 0.
//  exp_kink:  1 + a (1 - e^{xi/l}) for xi < 0, 1 - b (1 - e^{-xi/l}) for xi > 0.
//  standing:  1 - s on xi <= 0, 1 - s - b (1 - e^{-xi/l}) beyond, so that the
//             lattice data stay below 2 (no transitions).
//  custom:    user function; bounds are estimated by sampling.
// TODO: profiles with several kinks need a kink list in validate() and in the
// beta estimate.
struct ProfileSpec {
    enum class Kind { exp_kink, standing, custom };
    Kind kind = Kind::exp_kink;
    double a = 1.0;
    double b = 0.25;
    double ell = 0.25;
    double offset = 0.05;  // s, standing only
    std::function<double(double)> custom;

    double value(double xi) const;
    // sup |P'| and sup |P''| away from the kink.
    double slope_bound() const;
    double curvature_bound() const;
    // P'(0-) - P'(0+).
    double kink() const;
    // Throws DataError unless P > 1 left of 0 (P <= 1 for standing), -1 < P < 1
    // right of 0, and P is continuous at 0.
    void validate() const;

    static ProfileSpec reference();  // a = 1, b = 1/4, l = 1/4
    static ProfileSpec sweep();      // a = 9/4, b = 1/4, l = 1: slow decay of the interface speed
    static ProfileSpec standing_default();
};

std::string to_string(ProfileSpec::Kind k);
ProfileSpec::Kind profile_kind_from_string(const std::string& s);

struct ScaledData {
    double eps = 0.0;
    double c_eps = 0.0;
    // Measured on the lattice data: alpha = max(sup|grad+ p|/eps, sup_{j != 0}|Delta p_j|/eps^2),
    // beta = |Delta p_0| / eps.
    double alpha = 0.0;
    double beta = 0.0;
    double alpha_profile = 0.0;  // slope_bound + curvature_bound, an upper bound for sup |P'| + |P''|
    double beta_profile = 0.0;   // |kink|
    LatticeState state;          // Neumann window, interface between sites 0 and 1
    Vec p0;
};

// u_j(0) = P(eps j) + c_eps + sgn(-j) on a window wide enough for the horizon
// tau_end / eps^2. Throws DataError for invalid profiles or violated
// assumption inequalities, MarginError when no positive c_eps exists.
ScaledData build_initial_data(const ProfileSpec& profile, double eps, double tau_end);

struct ScaledRun {
    double eps = 0.0;
    double tau_end = 0.0;
    ScaledData data;
    si::SingleInterfaceRun run;
    Vec taus;  // snapshot times in tau
};

ScaledRun run_scaled(const ProfileSpec& profile, double eps, double tau_end, int n_snap = 100,
                     const si::SolverOptions& opts = {});

// Events with tau* < tau_end, in tau.
Vec event_taus(const ScaledRun& r);

struct RegularBoundsReport {
    double max_grad_slack = 0.0;  // max |grad+ q| - alpha eps, <= 0 when the bound holds
    double max_qdot_slack = 0.0;  // max |qdot| - (alpha eps^2 + beta eps g_0(t))
    std::size_t violations = 0;
    std::size_t checkpoints = 0;
};
RegularBoundsReport regular_part_bounds(const ScaledRun& r, const kernel::KernelSource& kern, double tol = 1e-13);

struct GapEntry {
    double eps = 0.0;
    long K = 0;              // transitions with tau* < tau_end
    double min_scaled_gap = INFINITY;  // min_k eps (t*_{k+1} - t*_k)
    double K_eps = 0.0;
};
struct GapReport {
    std::vector<GapEntry> entries;
    double d_star = 0.0;     // half the smallest min_scaled_gap
    double variation = 1.0; // max / min of min_scaled_gap
    bool K_bound_ok = true;  // K <= tau_end / (2 d_* eps) for every eps
    double max_K_eps = 0.0;
};
GapReport gap_statistics(const std::vector<ScaledRun>& runs);

// Lattice fields sampled at the snapshot times; site j stands for the cell
// [eps j - eps/2, eps j + eps/2).
struct Embedding {
    double eps = 0.0;
    long first_index = 0;
    Vec tau;
    std::vector<Vec> P, Q, R;
    Vec event_tau;
    std::vector<long> event_k;
    long k_initial = 0;
    double max_decomposition_residual = 0.0;

    double xi(std::size_t i) const { return eps * double(first_index + long(i)); }
    // eps k after the transition of site k, 0 before the first one.
    double xi_star(double tau) const;
};
Embedding build_embeddings(const ScaledRun& r, const kernel::KernelSource& kern);

struct SplitFields {
    double d_star = 0.0;
    std::vector<Vec> R1, R2;  // on the embedding grid
    double sup_R2 = 0.0;       // over the grid and the quadrature nodes
    double R2_L1 = 0.0;        // space-time L1 over [0, tau_end] x R
    double R2_outside = 0.0;   // max |R2| on grid points outside every [tau*_k, tau*_k + d_* eps]
    double R1_L1_sup = 0.0;    // sup_tau ||R1(tau, .)||_L1
    double gradR1_L2_sup = 0.0;// sup_tau ||grad_eps R1(tau, .)||_L2
    double interface_condition = 0.0;  // max_k |Q + R1 - 1| at (tau*_k, eps k)
};
// Builds R1 = -2 sum_k H_eps(tau - tau*_k, xi - eps k). The L1 norm of R2 is
// integrated over each regularization interval with graded nodes in
// s = t - t*_k, where R comes from the event log. Throws MarginError when two
// intervals overlap.
SplitFields split_R(const ScaledRun& r, const Embedding& emb, double d_star, const kernel::KernelSource& kern,
                    int nodes_per_event = 16);

struct HolderReport {
    double Q_time = 0.0;     // |dQ| / |dtau|^{1/2}
    double Q_space = 0.0;    // |dQ| / |dxi|
    std::vector<std::pair<double, double>> R1_time;  // (gamma, quotient)
    double R1_space = 0.0;   // |dR1| / |dxi|^{1/2}
    double xi_lipschitz = 0.0;
    double R1_L1_sup = 0.0;
    double gradR1_L2_sup = 0.0;
};
HolderReport holder_diagnostics(const Embedding& emb, const SplitFields& split);

struct LimitComparison {
    Vec eps;
    Vec xi_error;   // sup_tau |xi*_eps - xi*|
    Vec P_error;    // sup |Q + R1 - P| on the embedding grid inside the macro domain
    Vec min_P;      // min P_eps
    Vec max_P_right;// max P_eps right of the interface
    bool monotone = true;  // both errors decrease along decreasing eps within 10 %
};
LimitComparison compare_to_limit(const std::vector<Embedding>& embs, const std::vector<SplitFields>& splits,
                                 const macro::MacroSolution& limit);

// Limit solve for the profile with interface at 0 and no-flux ends at +-xi_half.
macro::MacroSolution solve_limit(const ProfileSpec& profile, double tau_end, double dxi, double xi_half = 3.0,
                                 int n_out = 200);

struct CrossCheck {
    double t = 0.0;
    double sup_distance = 0.0;
    std::size_t events = 0;
    std::uint64_t euler_steps = 0;
};
// Event solver against explicit Euler with a fixed step on the same window.
CrossCheck euler_cross_check(const ProfileSpec& profile, double eps, double t_end, double dt);

// Least-squares slope of log y against log x.
double loglog_slope(const Vec& x, const Vec& y);

struct SweepResult {
    ProfileSpec profile;
    double tau_end = 0.0;
    std::vector<ScaledRun> runs;
    std::vector<Embedding> embeddings;
    std::vector<RegularBoundsReport> bounds;
    GapReport gaps;
    double d_split = 0.0;  // 0.9 * fitted d_*, keeps the regularization intervals disjoint
    std::vector<SplitFields> splits;
    std::vector<HolderReport> holder;
    double R2_L1_slope = NAN;
    double R1_L1_ratio = 1.0;      // max / min over eps of sup_tau ||R1||_L1
    double gradR1_L2_ratio = 1.0;  // same for sup_tau ||grad R1||_L2
    double seconds = 0.0;
};

// Runs every eps concurrently, then fits d_* and builds the split. With no
// events anywhere the split is skipped and d_split stays 0.
SweepResult run_sweep(const ProfileSpec& profile, const Vec& eps_list, double tau_end,
                      const kernel::KernelSource& kern, int n_snap = 100);

} // namespace fbd::scaling
