#pragma once

#include "fbd/potential.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fbd {

using Vec = std::vector<double>;

struct BoundaryCondition {
    enum class Kind { neumann, dirichlet, window };
    Kind kind = Kind::neumann;
    double left = 0.0;  // dirichlet ghost values; unused otherwise
    double right = 0.0;

    static BoundaryCondition neumann() { return {}; }
    static BoundaryCondition dirichlet(double c1, double c2) { return {Kind::dirichlet, c1, c2}; }
    // Infinite lattice truncated by extending the edge values as constants.
    static BoundaryCondition window() { return {Kind::window, 0.0, 0.0}; }
};

std::string to_string(const BoundaryCondition& bc);

// Sites first_index, ..., first_index + u.size() - 1 at microscopic time t.
struct LatticeState {
    double t = 0.0;
    long first_index = 0;
    Vec u;
    BoundaryCondition bc;

    long last_index() const { return first_index + static_cast<long>(u.size()) - 1; }
    double at(long j) const { return u.at(static_cast<std::size_t>(j - first_index)); }
    // Throws InvalidStateError unless length >= 3 and all entries are finite.
    void validate() const;
};

// Ghost values (left, right) for a sequence under bc. map is applied to the
// Dirichlet constants so p-ghosts follow from u-ghosts.
std::pair<double, double> ghost_values(const Vec& v, const BoundaryCondition& bc,
                                       const std::function<double(double)>& map = {});

Vec discrete_laplacian(const Vec& p, const BoundaryCondition& bc);

// p_j = Phi'(u_j).
Vec chemical_potential(const Vec& u, const Potential& pot);

// Delta Phi'(u_j), with Dirichlet ghosts passed through Phi'.
Vec rhs(const LatticeState& state, const Potential& pot);

double energy(const LatticeState& state, const Potential& pot, double eps);
double dissipation(const LatticeState& state, const Potential& pot, double eps);

// (eps/2) sum (grad+ v)^2 for -Delta v = udot under Neumann bc, mean(v) = 0.
struct MetricSolve {
    Vec v;
    double value = 0.0;
};
MetricSolve metric_solve(const Vec& udot, double eps = 1.0, double tol = 1e-10);
double metric_potential(const Vec& udot, double eps = 1.0, double tol = 1e-10);

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};
Bounds comparison_bounds(const LatticeState& initial, const Potential& pot);

// Per-site (grad+ Upsilon(p_j)) (grad+ p_j), grad+ taken with Neumann extension.
Vec entropy_production(const LatticeState& state, const Potential& pot,
                       const std::function<double(double)>& upsilon);

double sum(const Vec& v);

} // namespace fbd
