#pragma once

#include <functional>
#include <optional>
#include <string>

namespace fbd {

enum class PotentialKind { smooth_demo, piecewise_quadratic, custom };

std::string to_string(PotentialKind kind);

// Double-well potential Phi with bistable derivative Phi'.
//
// Critical values follow the usual naming: dphi increases on (-inf, u_*] and
// [u^*, inf) and decreases in between; p_* = dphi(u^*), p^* = dphi(u_*);
// u_# < u_* and u^# > u^* are where the outer branches reach p_* and p^*.
class Potential {
public:
    using Fn = std::function<double(double)>;

    static Potential piecewise_quadratic();
    static Potential smooth_demo();
    // Spinodal points are bracketed by sign changes of dphi' on [lo, hi].
    // ddphi may be empty, in which case a central difference is used.
    static Potential custom(Fn phi, Fn dphi, Fn ddphi, double lo, double hi);

    PotentialKind kind() const { return kind_; }

    double phi(double u) const;
    double dphi(double u) const;
    // Second derivative; for piecewise-quadratic this is 1 away from 0.
    double ddphi(double u) const;

    double u_star_lo() const { return u_star_lo_; }
    double u_star_hi() const { return u_star_hi_; }
    double u_hash_lo() const { return u_hash_lo_; }
    double u_hash_hi() const { return u_hash_hi_; }
    double p_star_lo() const { return p_star_lo_; }
    double p_star_hi() const { return p_star_hi_; }

    // Stable-branch inverses of dphi: the u <= u_* (minus) or u >= u^* (plus)
    // solution of dphi(u) = p, when it exists.
    std::optional<double> branch_minus(double p) const;
    std::optional<double> branch_plus(double p) const;

    // sup |Phi''| over [lo, hi], sampled.
    double max_curvature(double lo, double hi) const;

private:
    Potential() = default;
    void locate_critical_values(double lo, double hi);

    PotentialKind kind_ = PotentialKind::custom;
    Fn phi_, dphi_, ddphi_;
    double u_star_lo_ = 0, u_star_hi_ = 0;
    double u_hash_lo_ = 0, u_hash_hi_ = 0;
    double p_star_lo_ = 0, p_star_hi_ = 0;
};

// Bisection for f(a) and f(b) of opposite sign, to |b - a| <= tol.
double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

} // namespace fbd
