#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace fbd::kernel {

// g_j(t) = (1/2pi) int_{-pi}^{pi} exp(-2(1 - cos k) t) cos(jk) dk, the
// fundamental solution of gdot = Delta g on Z.
//
// Two independent paths:
//  * fourier: trapezoidal rule on the periodic integrand. The error is the
//    aliasing sum over g_{j + lM}, so M is chosen from the Gaussian tail.
//  * bessel: g_j(t) = e^{-2t} I_j(2t) (generating function of I_n), evaluated
//    by Miller's backward recurrence normalized with sum_j g_j = 1.
// Beyond t = asymptotic_switch() both return the continuum Gaussian.

enum class Method { fourier_quadrature, bessel_series };

std::string to_string(Method m);

double asymptotic_switch();

// Lattice radius beyond which |g_j(t)| contributes < 1e-13 to sums.
long truncation_radius(double t);

// Trapezoid point count for rows up to |j| <= jmax.
int quadrature_points(double t, long jmax);

// g_0..g_jmax at t.
std::vector<double> bessel_row(double t, long jmax);
std::vector<double> fourier_row(double t, long jmax, int points = 0);
// int_0^t g_j(s) ds for j = 0..jmax, by quadrature of -expm1(-rho t)/rho.
std::vector<double> fourier_integral_row(double t, long jmax, int points = 0);
double g_asymptotic(long j, double t);

// Interface used by the verifiers so they can run against any evaluator.
class KernelSource {
public:
    virtual ~KernelSource() = default;
    virtual double g(long j, double t) const = 0;
    virtual double g_integral(long j, double t) const = 0;
    // g_0..g_jmax at t.
    virtual std::vector<double> row(double t, long jmax) const;

    double g_dot(long j, double t) const;
};

class KernelEvaluator : public KernelSource {
public:
    explicit KernelEvaluator(Method method = Method::bessel_series, int quadrature_points = 0, bool cache = true);

    Method method() const { return method_; }
    int quadrature_points() const { return points_; }

    double g(long j, double t) const override;
    double g_integral(long j, double t) const override;
    std::vector<double> row(double t, long jmax) const override;
    std::vector<double> integral_row(double t, long jmax) const;

    std::size_t cache_size() const;

private:
    Method method_;
    int points_;
    bool use_cache_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::pair<long, double>, double> cache_;
};

// Macroscopic embeddings under tau = eps^2 t, xi = eps j.
// xi must lie on eps Z within 1e-9 (relative to eps), else DomainError.
long grid_index(double xi, double eps);
double G_eps(const KernelSource& k, double tau, double xi, double eps);
double H_eps(const KernelSource& k, double tau, double xi, double eps, double d_star);

struct MonotonicityReport {
    double max_violation = 0.0;
    std::size_t violations = 0;
    std::map<std::string, double> worst;  // per check name
};
MonotonicityReport verify_monotonicity(const KernelSource& k, const std::vector<double>& t_grid);

struct KernelBoundReport {
    double fitted_c = 0.0;          // largest c with g_0 >= c (1+t)^{-1/2}
    double fitted_C = 0.0;          // max of the three upper constants below
    double fitted_C_g = 0.0;        // g_0 <= C (1+t)^{-1/2}
    double fitted_C_dot = 0.0;      // |gdot_j| <= C (1+t)^{-3/2}
    double fitted_C_grad = 0.0;     // sum (grad+ g)^2 <= C (1+t)^{-3/2}
    double max_conservation_error = 0.0;
    double max_violation = 0.0;
    std::size_t violations = 0;
    std::map<double, long> truncation;  // t -> J(t) used for the lattice sums
};
KernelBoundReport verify_decay(const KernelSource& k, const std::vector<double>& t_grid, long j_lo, long j_hi);

// sup over t >= 0 of the scaled quantities, from a dense log grid refined by
// golden section; these are the constants the Holder cross-checks rely on.
double sup_scaled_gdot0(const KernelSource& k);
double sup_scaled_grad_energy(const KernelSource& k);

struct HolderReport {
    std::map<double, double> C_gamma;        // temporal constants per gamma
    std::map<double, double> C_gamma_bound;  // 2 C_dot sup_s f_gamma(s)
    double C_spatial = 0.0;
    double C_spatial_bound = 0.0;            // sqrt of the gradient-energy constant
    double max_violation = 0.0;
    std::size_t violations = 0;
    std::size_t pairs = 0;
};
HolderReport verify_holder(const KernelSource& k, const std::vector<double>& t_grid, long j_lo, long j_hi,
                           const std::vector<double>& gammas = {0.25, 0.5, 0.75, 1.0});

// 0 followed by per_decade log-spaced points from 1e-3 to t_max.
std::vector<double> standard_t_grid(double t_max = 1e4, int per_decade = 12);

} // namespace fbd::kernel
