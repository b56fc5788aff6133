#include "fbd/errors.hpp"
#include "fbd/lattice.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fbd;

namespace {

LatticeState state(Vec u, long first = 0)
{
    LatticeState s;
    s.u = std::move(u);
    s.first_index = first;
    return s;
}

} // namespace

TEST_CASE("discrete laplacian")
{
    auto n = BoundaryCondition::neumann();
    CHECK(discrete_laplacian({2, 2, 2, 2}, n) == Vec{0, 0, 0, 0});
    CHECK(discrete_laplacian({0, 1, 0}, n)[1] == -2.0);
    CHECK(discrete_laplacian({1, 2, 4}, n) == Vec{1, 1, -2});
    auto d = discrete_laplacian({1, 2, 4}, BoundaryCondition::dirichlet(0.0, 0.0));
    CHECK(d == Vec{0, 1, -6});
}

TEST_CASE("rhs")
{
    auto pq = Potential::piecewise_quadratic();
    CHECK(rhs(state({1, 1, 1}), pq) == Vec{0, 0, 0});
    CHECK(rhs(state({3, -1, -1}), pq) == Vec{-2, 2, 0});
    auto sd = Potential::smooth_demo();
    for (double v : rhs(state({1, 1, 1, 1}), sd)) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("energy and dissipation")
{
    auto pq = Potential::piecewise_quadratic();
    CHECK(energy(state({1, -1, 1}), pq, 0.3) == 0.0);
    CHECK(energy(state({0}), pq, 1.0) == doctest::Approx(0.5));
    CHECK(energy(state(Vec(21, 0.0)), Potential::smooth_demo(), 0.1) == doctest::Approx(4.2));
    CHECK(dissipation(state({3, -1}), pq, 1.0) == doctest::Approx(4.0));
    CHECK(dissipation(state({0.5, 0.5, 0.5}), pq, 1.0) == 0.0);
    CHECK_THROWS_AS(energy(state({1}), pq, 0.0), DomainError);
}

TEST_CASE("metric potential")
{
    CHECK(metric_potential({0, 0, 0}) == 0.0);
    // -Delta v = (1, -1) with Neumann ghosts gives v = (1/2, -1/2).
    auto m = metric_solve({1, -1});
    CHECK(m.v[0] - m.v[1] == doctest::Approx(1.0));
    CHECK(m.value == doctest::Approx(0.5));

    // Property: value equals (1/2) <udot, v> / eps for mean-zero udot.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 20; ++rep) {
        Vec f(12);
        double mean = 0;
        for (double& x : f) mean += (x = nd(rng));
        mean /= 12;
        for (double& x : f) x -= mean;
        auto s = metric_solve(f, 1.0, 1e-13);
        double ip = 0;
        for (std::size_t i = 0; i < f.size(); ++i) ip += f[i] * s.v[i];
        CHECK(s.value == doctest::Approx(0.5 * ip).epsilon(1e-8));
        CHECK(s.value >= 0.0);
    }
}

TEST_CASE("comparison bounds")
{
    auto pq = Potential::piecewise_quadratic();
    auto b = comparison_bounds(state({-1.5, 0.3, 1.5}), pq);
    CHECK(b.lower == -2.0);
    CHECK(b.upper == 2.0);
    CHECK(comparison_bounds(state({5, 0}), pq).upper == 5.0);
}

TEST_CASE("entropy production is non-negative for increasing Upsilon")
{
    auto sd = Potential::smooth_demo();
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ud(-2.5, 2.5);
    const std::function<double(double)> ups[] = {[](double p) { return std::tanh(p); },
                                                 [](double p) { return p; },
                                                 [](double p) { return p * p * p + p; }};
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        LatticeState s;
        s.u.resize(30);
        for (double& x : s.u) x = ud(rng);
        for (const auto& f : ups)
            for (double e : entropy_production(s, sd, f)) worst = std::min(worst, e);
    }
    CHECK(worst >= -1e-12);
}

TEST_CASE("state validation")
{
    CHECK_THROWS_AS(state({1, 2}).validate(), InvalidStateError);
    CHECK_THROWS_AS(state({1, NAN, 2}).validate(), InvalidStateError);
    CHECK_NOTHROW(state({1, 2, 3}).validate());
}

TEST_CASE("compensated sum")
{
    Vec v{1e16, 1.0, -1e16, 1.0};
    CHECK(sum(v) == 2.0);
}
