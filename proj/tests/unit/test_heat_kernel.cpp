#include "fbd/errors.hpp"
#include "fbd/heat_kernel.hpp"

#include <doctest.h>

#include <cmath>

using namespace fbd;
using namespace fbd::kernel;

namespace {

// Independent oracle from the standard library special functions.
double g_std(long j, double t)
{
    return std::exp(-2.0 * t) * std::cyl_bessel_i(double(std::abs(j)), 2.0 * t);
}

class Negated : public KernelSource {
public:
    double g(long j, double t) const override { return -base.g(j, t); }
    double g_integral(long j, double t) const override { return -base.g_integral(j, t); }
    KernelEvaluator base;
};

} // namespace

TEST_CASE("initial values and symmetry")
{
    for (auto m : {Method::bessel_series, Method::fourier_quadrature}) {
        KernelEvaluator k(m);
        CHECK(k.g(0, 0.0) == 1.0);
        CHECK(k.g(3, 0.0) == 0.0);
        CHECK(k.g(-1, 0.0) == 0.0);
        for (double t : {0.3, 2.0, 40.0}) CHECK(k.g(1, t) == k.g(-1, t));
        CHECK(k.g_dot(0, 0.0) == doctest::Approx(-2.0));
        CHECK(k.g_dot(0, 1.0) < 0.0);
    }
}

TEST_CASE("both paths match the std::cyl_bessel_i oracle")
{
    KernelEvaluator b(Method::bessel_series), f(Method::fourier_quadrature);
    CHECK(b.g(0, 1.0) == doctest::Approx(0.3085083225).epsilon(1e-9));
    for (double t : {0.01, 0.5, 1.0, 7.0, 30.0, 200.0})
        for (long j : {0L, 1L, 5L, 17L, 40L}) {
            CHECK(std::abs(b.g(j, t) - g_std(j, t)) < 1e-12);
            CHECK(std::abs(f.g(j, t) - g_std(j, t)) < 1e-12);
        }
}

TEST_CASE("conservation and asymptotics")
{
    KernelEvaluator k;
    for (double t : {0.1, 1.0, 5.0, 10.0, 100.0}) {
        long J = truncation_radius(t);
        auto row = k.row(t, J);
        double s = row[0];
        for (long j = 1; j <= J; ++j) s += 2.0 * row[std::size_t(j)];
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
    double t = 1e4;
    CHECK(std::sqrt(t) * k.g(0, t) == doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI))).epsilon(0.01));
}

TEST_CASE("integral of g matches quadrature of g")
{
    KernelEvaluator k;
    for (long j : {0L, 2L}) {
        const double T = 3.0;
        const int n = 2000;
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = T * i / n, b = T * (i + 1) / n, m = 0.5 * (a + b);
            s += (b - a) / 6.0 * (k.g(j, a) + 4.0 * k.g(j, m) + k.g(j, b));
        }
        CHECK(k.g_integral(j, T) == doctest::Approx(s).epsilon(1e-10));
    }
}

TEST_CASE("verifiers")
{
    KernelEvaluator k;
    std::vector<double> grid;
    for (int i = 0; i <= 200; ++i) grid.push_back(0.5 * i);
    auto m = verify_monotonicity(k, grid);
    CHECK(m.violations == 0);
    CHECK(verify_monotonicity(k, {1.0}).violations == 0);

    Negated neg;
    CHECK(verify_monotonicity(neg, grid).violations > 0);
    CHECK(verify_monotonicity(neg, grid).max_violation > 0.0);

    auto d = verify_decay(k, standard_t_grid(1e3, 6), -50, 50);
    CHECK(d.violations == 0);
    CHECK(d.fitted_c <= d.fitted_C);
    CHECK(d.fitted_c > 0.0);

    std::vector<double> hg;
    for (double t : {0.0, 0.5, 1.0, 3.0, 10.0, 30.0, 100.0}) hg.push_back(t);
    auto h = verify_holder(k, hg, -20, 20);
    CHECK(h.violations == 0);
    CHECK(std::isfinite(h.C_gamma.at(1.0)));
    // gamma = 1 quotient is a difference quotient of g, bounded by the gdot constant.
    CHECK(h.C_gamma.at(1.0) <= h.C_gamma_bound.at(1.0));
}

TEST_CASE("macroscopic embeddings")
{
    KernelEvaluator k;
    const double eps = 0.1, ds = 0.3;
    CHECK(G_eps(k, eps * eps, 0.0, eps) == doctest::Approx(k.g(0, 1.0)));
    CHECK(H_eps(k, -0.1, 0.0, eps, ds) == 0.0);
    CHECK(H_eps(k, 0.0, 0.2, eps, ds) == 0.0);
    CHECK(H_eps(k, ds * eps, 0.2, eps, ds) == doctest::Approx(G_eps(k, ds * eps, 0.2, eps)).epsilon(1e-12));
    CHECK(H_eps(k, 0.5, 0.2, eps, ds) == G_eps(k, 0.5, 0.2, eps));
    CHECK_THROWS_AS(G_eps(k, 0.1, 0.15, eps), DomainError);
    CHECK(grid_index(-0.3, eps) == -3);
}

TEST_CASE("standard grid")
{
    auto g = standard_t_grid(1e4, 10);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(1e4));
    CHECK_THROWS_AS(standard_t_grid(1e-4), DomainError);
}
