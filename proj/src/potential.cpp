#include "fbd/potential.hpp"

#include "fbd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fbd {

std::string to_string(PotentialKind kind)
{
    switch (kind) {
    case PotentialKind::smooth_demo: return "smooth-demo";
    case PotentialKind::piecewise_quadratic: return "piecewise-quadratic";
    case PotentialKind::custom: return "custom";
    }
    return "custom";
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol)
{
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0) == (fb < 0))
        throw DomainError("bisect: no sign change on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    while (std::abs(b - a) > tol) {
        double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

namespace {

double sgn(double u) { return u >= 0.0 ? 1.0 : -1.0; }

double smooth_phi(double u)
{
    double s = 1.0 - u * u;
    return 2.0 * s * s / (1.0 + u * u);
}

double smooth_dphi(double u)
{
    double d = 1.0 + u * u;
    return 4.0 * u - 16.0 * u / (d * d);
}

double smooth_ddphi(double u)
{
    double d = 1.0 + u * u;
    return 4.0 - 16.0 * (1.0 - 3.0 * u * u) / (d * d * d);
}

// Grows b away from a until f changes sign, then bisects.
std::optional<double> solve_monotone(const std::function<double(double)>& f, double a, double dir)
{
    double fa = f(a);
    if (fa == 0.0) return a;
    double step = 1.0;
    for (int i = 0; i < 80; ++i) {
        double b = a + dir * step;
        double fb = f(b);
        if (!std::isfinite(fb)) return std::nullopt;
        if ((fb < 0) != (fa < 0) || fb == 0.0) return bisect(f, a, b, 1e-13);
        step *= 2.0;
    }
    return std::nullopt;
}

} // namespace

Potential Potential::piecewise_quadratic()
{
    Potential p;
    p.kind_ = PotentialKind::piecewise_quadratic;
    p.u_star_lo_ = 0.0;
    p.u_star_hi_ = 0.0;
    p.u_hash_lo_ = -2.0;
    p.u_hash_hi_ = 2.0;
    // dphi(0) = -1 by the sgn(0) = +1 convention; p^* is the left limit at 0.
    p.p_star_lo_ = -1.0;
    p.p_star_hi_ = 1.0;
    return p;
}

Potential Potential::smooth_demo()
{
    Potential p;
    p.kind_ = PotentialKind::smooth_demo;
    p.u_star_hi_ = bisect(smooth_ddphi, 0.0, 1.0);
    p.u_star_lo_ = -p.u_star_hi_;
    p.p_star_lo_ = smooth_dphi(p.u_star_hi_);
    p.p_star_hi_ = smooth_dphi(p.u_star_lo_);
    p.u_hash_hi_ = *solve_monotone([&](double u) { return smooth_dphi(u) - p.p_star_hi_; }, p.u_star_hi_, 1.0);
    p.u_hash_lo_ = -p.u_hash_hi_;
    return p;
}

Potential Potential::custom(Fn phi, Fn dphi, Fn ddphi, double lo, double hi)
{
    if (!phi || !dphi) throw ConfigError("custom potential needs phi and dphi");
    if (!(lo < hi)) throw ConfigError("custom potential: empty search range");
    Potential p;
    p.kind_ = PotentialKind::custom;
    p.phi_ = std::move(phi);
    p.dphi_ = std::move(dphi);
    if (ddphi) {
        p.ddphi_ = std::move(ddphi);
    } else {
        Fn d = p.dphi_;
        p.ddphi_ = [d](double u) {
            double h = 1e-6 * std::max(1.0, std::abs(u));
            return (d(u + h) - d(u - h)) / (2.0 * h);
        };
    }
    p.locate_critical_values(lo, hi);
    return p;
}

void Potential::locate_critical_values(double lo, double hi)
{
    const int n = 4000;
    std::vector<double> roots;
    double prev_u = lo;
    double prev_v = ddphi_(lo);
    for (int i = 1; i <= n; ++i) {
        double u = lo + (hi - lo) * i / n;
        double v = ddphi_(u);
        if ((v < 0) != (prev_v < 0)) roots.push_back(bisect(ddphi_, prev_u, u));
        prev_u = u;
        prev_v = v;
    }
    if (roots.size() != 2 || ddphi_(0.5 * (roots[0] + roots[1])) >= 0)
        throw DataError("custom potential: dphi is not bistable on the search range");
    u_star_lo_ = roots[0];
    u_star_hi_ = roots[1];
    p_star_lo_ = dphi_(u_star_hi_);
    p_star_hi_ = dphi_(u_star_lo_);
    auto hash_hi = solve_monotone([&](double u) { return dphi_(u) - p_star_hi_; }, u_star_hi_, 1.0);
    auto hash_lo = solve_monotone([&](double u) { return dphi_(u) - p_star_lo_; }, u_star_lo_, -1.0);
    if (!hash_hi || !hash_lo) throw DataError("custom potential: outer branches do not reach critical values");
    u_hash_hi_ = *hash_hi;
    u_hash_lo_ = *hash_lo;
}

double Potential::phi(double u) const
{
    switch (kind_) {
    case PotentialKind::piecewise_quadratic: {
        double a = u - 1.0, b = u + 1.0;
        return 0.5 * std::min(a * a, b * b);
    }
    case PotentialKind::smooth_demo: return smooth_phi(u);
    case PotentialKind::custom: return phi_(u);
    }
    return 0.0;
}

double Potential::dphi(double u) const
{
    switch (kind_) {
    case PotentialKind::piecewise_quadratic: return u - sgn(u);
    case PotentialKind::smooth_demo: return smooth_dphi(u);
    case PotentialKind::custom: return dphi_(u);
    }
    return 0.0;
}

double Potential::ddphi(double u) const
{
    switch (kind_) {
    case PotentialKind::piecewise_quadratic: return 1.0;
    case PotentialKind::smooth_demo: return smooth_ddphi(u);
    case PotentialKind::custom: return ddphi_(u);
    }
    return 0.0;
}

std::optional<double> Potential::branch_minus(double p) const
{
    if (p > p_star_hi_) return std::nullopt;
    if (kind_ == PotentialKind::piecewise_quadratic) return p - 1.0;
    return solve_monotone([&](double u) { return dphi(u) - p; }, u_star_lo_, -1.0);
}

std::optional<double> Potential::branch_plus(double p) const
{
    if (p < p_star_lo_) return std::nullopt;
    if (kind_ == PotentialKind::piecewise_quadratic) return p + 1.0;
    return solve_monotone([&](double u) { return dphi(u) - p; }, u_star_hi_, 1.0);
}

double Potential::max_curvature(double lo, double hi) const
{
    if (kind_ == PotentialKind::piecewise_quadratic) return 1.0;
    const int n = 20000;
    double m = 0.0;
    for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(ddphi(lo + (hi - lo) * i / n)));
    if (lo < 0.0 && hi > 0.0) m = std::max(m, std::abs(ddphi(0.0)));
    return m;
}

} // namespace fbd
