#pragma once

#include "fbd/heat_kernel.hpp"
#include "fbd/lattice.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

namespace fbd::si {

// u in X_k: u_j > 0 for j < k and -2 < u_j < 0 for j >= k (strict).
bool check_membership(const Vec& u, long first_index, long k);

// First index with u_j < 0, i.e. the k for which u may lie in X_k.
long interface_index(const Vec& u, long first_index);

// Delta u + 2 delta^{k-1} - 2 delta^k under Neumann ghosts; the delta terms
// vanish when the interface sits on the window edge. Throws
// PhaseConsistencyError unless u is in X_k.
Vec linear_rhs(const Vec& u, long first_index, long k);

// The source b with udot = Delta u + b in X_k, without the membership check.
Vec source_vector(std::size_t size, long first_index, long k);

// Cosine modes phi_m(i) = cos(pi m (i + 1/2) / M) of the Neumann Laplacian on
// M sites, lambda_m = -4 sin^2(pi m / (2M)).
class NeumannModes {
public:
    explicit NeumannModes(std::size_t M);

    std::size_t size() const { return M_; }
    double lambda(std::size_t m) const { return lambda_[m]; }
    double basis(std::size_t m, std::size_t i) const;
    // Coefficients c with v = sum_m c_m phi_m.
    Vec project(const Vec& v) const;
    Vec synthesize(const Vec& c) const;

private:
    std::size_t M_;
    Vec lambda_;
    Vec cos_table_;  // cos(2 pi r / (4M))
};

// Exact solution of udot = Delta_N u + b from u(0) = u0, expanded in modes:
// u(s) = u_inf + sum_m A_m e^{lambda_m s} phi_m.
class LinearFlow {
public:
    LinearFlow(std::shared_ptr<const NeumannModes> modes, const Vec& u0, const Vec& b);

    // One site's expansion, for repeated evaluation in the event scan.
    struct Component {
        double base = 0.0;
        Vec coef;  // A_m phi_m(i)
        Vec lam;
        double value(double s) const;
        double derivative(double s) const;
        // sup over s' >= s of |d^2 u_i / ds^2|.
        double curvature_bound(double s) const;
    };
    Component component(std::size_t i) const;

    double value(std::size_t i, double s) const;
    double derivative(std::size_t i, double s) const;
    Vec state(double s) const;

private:
    std::shared_ptr<const NeumannModes> modes_;
    Vec amp_;      // A_m
    Vec u_inf_;    // steady part, includes the conserved mean
};

enum class InterEventMethod { spectral, duhamel, stepping };

struct DenseOutput {
    InterEventMethod method = InterEventMethod::spectral;
    std::vector<double> times;  // relative to the start of the interval
    std::vector<Vec> states;
    double error_estimate = 0.0;  // Richardson estimate for stepping, 0 otherwise
};

// Integrates the linear X_k dynamics on a Neumann window for the given
// (relative, non-negative) times.
DenseOutput inter_event_integrator(const Vec& u0, long first_index, long k, const std::vector<double>& t_span,
                                   InterEventMethod method, const kernel::KernelEvaluator& kern,
                                   double step = 1.0 / 64.0);

// Runs all three methods; throws InconsistencyError when any pair differs by
// more than tol. Returns the largest pairwise sup-norm difference.
double cross_check_methods(const Vec& u0, long first_index, long k, const std::vector<double>& t_span,
                           const kernel::KernelEvaluator& kern, double tol = 1e-8);

// y_j = sum_i G^N_{j,i} x_i with G^N_{j,i} = sum_n (w_{j-i+2nM} + w_{j+i+1+2nM}),
// where w is a symmetric lattice kernel given for |n| <= row.size() - 1 and zero beyond.
Vec apply_neumann_images(const Vec& row, const Vec& x);

struct SingleInterfaceState {
    long k = 0;
    double t = 0.0;
    long first_index = 0;
    Vec u;
    double D = 2.0;
};

struct TransitionEvent {
    long k = 0;  // site that crossed 0; the interface index becomes k + 1
    double t_star = 0.0;
    double u_left = 0.0;  // u_{k-1}(t*)
    double udot_before = 0.0;
    double udot_after = 0.0;
    double residual = 0.0;  // |u_k(t*)| from the flow before snapping to 0
    double jump() const { return udot_after - udot_before; }
};

struct TransitionLog {
    double D = 2.0;
    std::vector<TransitionEvent> events;
};

struct SolverOptions {
    double h_min = 1e-3;        // smallest scan step once the safe step collapses
    double h_max = 1.0;         // scan step cap at s = 0
    double h_max_growth = 0.05; // cap grows as h_max + growth * s within an interval
    double bisect_width = 1e-12;
    double event_tol = 1e-10;
    long neighbor_radius = 3;
};

struct AdvanceResult {
    SingleInterfaceState state;
    std::optional<TransitionEvent> event;
    std::size_t scan_points = 0;
};

class SingleInterfaceSolver {
public:
    SingleInterfaceSolver(std::size_t window_size, SolverOptions opts = {});

    // Integrates from state until u_k first reaches 0 or t = horizon. Snapshot
    // times in [state.t, t*) (or up to the horizon) are appended to snaps.
    AdvanceResult advance_to_next_transition(const SingleInterfaceState& state, double horizon,
                                             const std::vector<double>& snapshot_times,
                                             std::vector<SingleInterfaceState>* snaps) const;

private:
    std::shared_ptr<const NeumannModes> modes_;
    SolverOptions opts_;
};

struct SingleInterfaceRun {
    std::vector<SingleInterfaceState> snapshots;
    TransitionLog log;
    SingleInterfaceState final_state;
    double t0 = 0.0;
    double horizon = 0.0;
    std::size_t scan_points = 0;
    double boundary_effect = 0.0;  // kernel mass beyond the window edges at the horizon
};

// Initial data must be in X_k for k = interface_index(initial.u); the window
// is treated with Neumann ghosts.
SingleInterfaceRun run_single_interface(const LatticeState& initial, double horizon,
                                        const std::vector<double>& snapshot_times, SolverOptions opts = {});

struct LogCheck {
    double min_u_left_margin = INFINITY;  // min u_{k-1}(t*) - 2
    double max_jump_error = 0.0;          // max |jump - 4|
    double min_gap_margin = INFINITY;     // min gap - ln sqrt((D+2)/(D-2))
    bool increasing = true;
    bool sequential = true;               // interface indices increase by one
    bool ok(double tol = 1e-8) const;
};
LogCheck check_log(const TransitionLog& log);

// ln sqrt((D+2)/(D-2)); infinite for D <= 2.
double minimal_gap(double D);

struct Decomposition {
    std::vector<double> times;
    std::vector<Vec> q;
    std::vector<Vec> r;
    std::vector<double> residual;  // sup |p - (q + r)| per checkpoint
    double max_residual = 0.0;
};

// p = u - sgn(u) with sgn(0) = +1.
Vec p_from_u(const Vec& u);

Vec regular_part(const Vec& p0, double t, const kernel::KernelSource& kern);
Vec singular_part(const TransitionLog& log, long first_index, std::size_t size, double t,
                  const kernel::KernelSource& kern);

// Rebuilds q and r at every snapshot of run and checks p = q + r.
// Throws DecompositionMismatch when the residual exceeds tol.
Decomposition decompose(const SingleInterfaceRun& run, const Vec& p0, const kernel::KernelSource& kern,
                        double tol = 1e-6);

} // namespace fbd::si
