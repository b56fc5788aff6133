#include "fbd/lattice.hpp"

#include "fbd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fbd {

std::string to_string(const BoundaryCondition& bc)
{
    switch (bc.kind) {
    case BoundaryCondition::Kind::neumann: return "neumann";
    case BoundaryCondition::Kind::dirichlet: return "dirichlet";
    case BoundaryCondition::Kind::window: return "window";
    }
    return "neumann";
}

void LatticeState::validate() const
{
    if (u.size() < 3) throw InvalidStateError("lattice state needs at least 3 sites, got " + std::to_string(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!std::isfinite(u[i]))
            throw InvalidStateError("non-finite value at site " + std::to_string(first_index + long(i)));
    if (!std::isfinite(t)) throw InvalidStateError("non-finite time");
}

std::pair<double, double> ghost_values(const Vec& v, const BoundaryCondition& bc,
                                       const std::function<double(double)>& map)
{
    if (bc.kind == BoundaryCondition::Kind::dirichlet) {
        if (map) return {map(bc.left), map(bc.right)};
        return {bc.left, bc.right};
    }
    return {v.front(), v.back()};
}

namespace {

Vec laplacian_with_ghosts(const Vec& p, double gl, double gr)
{
    const std::size_t n = p.size();
    Vec out(n);
    if (n == 1) {
        out[0] = gl - 2.0 * p[0] + gr;
        return out;
    }
    out[0] = p[1] - 2.0 * p[0] + gl;
    for (std::size_t j = 1; j + 1 < n; ++j) out[j] = p[j + 1] - 2.0 * p[j] + p[j - 1];
    out[n - 1] = gr - 2.0 * p[n - 1] + p[n - 2];
    return out;
}

} // namespace

Vec discrete_laplacian(const Vec& p, const BoundaryCondition& bc)
{
    if (p.empty()) throw InvalidStateError("discrete_laplacian: empty sequence");
    auto [gl, gr] = ghost_values(p, bc);
    return laplacian_with_ghosts(p, gl, gr);
}

Vec chemical_potential(const Vec& u, const Potential& pot)
{
    Vec p(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) p[j] = pot.dphi(u[j]);
    return p;
}

Vec rhs(const LatticeState& state, const Potential& pot)
{
    if (state.u.empty()) throw InvalidStateError("rhs: empty state");
    Vec p = chemical_potential(state.u, pot);
    auto [gl, gr] = ghost_values(p, state.bc, [&](double c) { return pot.dphi(c); });
    return laplacian_with_ghosts(p, gl, gr);
}

double energy(const LatticeState& state, const Potential& pot, double eps)
{
    if (!(eps > 0)) throw DomainError("energy: eps must be positive");
    double e = 0.0;
    for (double u : state.u) e += pot.phi(u);
    return eps * e;
}

double dissipation(const LatticeState& state, const Potential& pot, double eps)
{
    if (!(eps > 0)) throw DomainError("dissipation: eps must be positive");
    Vec p = chemical_potential(state.u, pot);
    double d = 0.0;
    for (std::size_t j = 0; j + 1 < p.size(); ++j) d += (p[j + 1] - p[j]) * (p[j + 1] - p[j]);
    if (state.bc.kind == BoundaryCondition::Kind::dirichlet) {
        double gl = pot.dphi(state.bc.left), gr = pot.dphi(state.bc.right);
        d += (p.front() - gl) * (p.front() - gl) + (gr - p.back()) * (gr - p.back());
    }
    return d / eps;
}

MetricSolve metric_solve(const Vec& udot, double eps, double tol)
{
    if (udot.empty()) throw InvalidStateError("metric_potential: empty sequence");
    double total = sum(udot);
    if (std::abs(total) > tol)
        throw CompatibilityError("metric_potential: sum of udot is " + std::to_string(total) + ", Neumann solve needs 0");
    const std::size_t n = udot.size();
    // -Delta v = udot with v_{-1} = v_0 telescopes to grad+ v_j = -sum_{i<=j} udot_i.
    Vec w(n - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        acc += udot[j];
        w[j] = -acc;
    }
    MetricSolve out;
    out.v.assign(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) out.v[j] = out.v[j - 1] + w[j - 1];
    double mean = sum(out.v) / double(n);
    for (double& x : out.v) x -= mean;
    double r = 0.0;
    for (double x : w) r += x * x;
    out.value = 0.5 * eps * r;
    return out;
}

double metric_potential(const Vec& udot, double eps, double tol) { return metric_solve(udot, eps, tol).value; }

Bounds comparison_bounds(const LatticeState& initial, const Potential& pot)
{
    if (initial.u.empty()) throw InvalidStateError("comparison_bounds: empty state");
    auto [lo, hi] = std::minmax_element(initial.u.begin(), initial.u.end());
    return {std::min(pot.u_hash_lo(), *lo), std::max(pot.u_hash_hi(), *hi)};
}

Vec entropy_production(const LatticeState& state, const Potential& pot,
                       const std::function<double(double)>& upsilon)
{
    Vec p = chemical_potential(state.u, pot);
    Vec out(p.size(), 0.0);
    // Neumann extension makes the last forward difference vanish.
    for (std::size_t j = 0; j + 1 < p.size(); ++j)
        out[j] = (upsilon(p[j + 1]) - upsilon(p[j])) * (p[j + 1] - p[j]);
    return out;
}

double sum(const Vec& v)
{
    // Neumaier compensated sum: mass checks compare against 1e-9 * N.
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

} // namespace fbd
