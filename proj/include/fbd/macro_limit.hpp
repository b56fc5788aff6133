#pragma once

#include <functional>
#include <vector>

namespace fbd::macro {

using Vec = std::vector<double>;

struct GridParams {
    double xi_min = -2.0;
    double xi_max = 2.0;
    double dxi = 1e-2;
    double cfl = 0.5;      // dtau = cfl * dxi^2, must be <= 1/2
    double tau_end = 0.2;
    int n_out = 200;       // output intervals; snapshots at tau_end * n / n_out
    void validate() const;
};

// Per-step record of the interface, used by the residual evaluators.
struct InterfaceTrace {
    double dtau = 0.0;
    Vec tau;
    Vec xi_star;
    Vec slope_left;   // (P_{I-1} - P_{I-2}) / dxi
    Vec slope_right;  // (P_{I+2} - P_{I+1}) / dxi
    Vec p_interface;  // P in the interface cell after the update
    Vec p_trial;      // P in the interface cell before the relay acts
};

struct MacroSolution {
    GridParams grid;
    Vec tau_grid;
    Vec xi_grid;               // cell centres
    std::vector<Vec> P;        // per output time
    std::vector<Vec> mu;       // +1 / -1 per cell; the interface cell by its centre
    std::vector<Vec> U;        // P + mu with the absorbed fraction in the interface cell
    Vec xi_star;               // per output time
    InterfaceTrace trace;
    double max_conservation_error = 0.0;  // |change of sum U dxi - boundary flux| per step
    double min_P = 0.0;
    double max_P_right = 0.0;  // max P over cells right of the interface cell
    long relay_advances = 0;
};

// P0 is sampled at cell centres. Left of xi0 it must exceed -1, right of xi0
// lie in (-1, 1]; otherwise DataError. Neumann (no-flux) ends.
MacroSolution solve_fbp(const std::function<double(double)>& P0, double xi0, const GridParams& grid);

// |2 dxi*/dtau - [dP/dxi]| per step, both smoothed over a centred window of
// `window` steps.
Vec stefan_residual(const MacroSolution& sol, int window = 5);
// Time average of stefan_residual over tau in [tau_lo, tau_hi].
double stefan_residual_mean(const MacroSolution& sol, double tau_lo, double tau_hi, int window = 5);

// m(tau) = ||P1 - P2||_L1 + 2 |xi1* - xi2*| on the common output grid.
Vec hilpert_contraction(const MacroSolution& a, const MacroSolution& b);
// max over n of m(tau_n) / min_{n' <= n} m(tau_n'); <= 1 means non-increasing.
double contraction_ratio(const Vec& m);

struct BumpTest {
    double tau_c, tau_r, xi_c, xi_r;
};
// Tensor products of C-infinity bumps at three scales, placed on the
// interface path and away from it.
std::vector<BumpTest> default_test_functions(const MacroSolution& sol);
// max over tests of |int int U dpsi/dtau + P d2psi/dxi2|.
double distributional_residual(const MacroSolution& sol, const std::vector<BumpTest>& tests);

// Linear interpolation of xi* at tau (output grid).
double xi_star_at(const MacroSolution& sol, double tau);
// Linear interpolation of P at (output index, xi).
double P_at(const MacroSolution& sol, std::size_t n, double xi);

} // namespace fbd::macro
