#include "fbd/errors.hpp"
#include "fbd/integrator.hpp"

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

TEST_CASE("euler step")
{
    auto pq = Potential::piecewise_quadratic();
    auto s = euler_step(state({3, -1, -1}), pq, 0.1);
    CHECK(s.u[0] == doctest::Approx(2.8));
    CHECK(s.u[1] == doctest::Approx(-0.8));
    CHECK(s.u[2] == doctest::Approx(-1.0));
    CHECK(s.t == doctest::Approx(0.1));
    CHECK(euler_step(state({0.3, 0.3, 0.3}), pq, 5.0).u == Vec{0.3, 0.3, 0.3});
    CHECK(euler_step(state({3, -1, -1}), pq, 0.0).u == Vec{3, -1, -1});
    CHECK_THROWS_AS(euler_step(state({3, -1, -1}), pq, -1.0), DomainError);
}

TEST_CASE("stability dt")
{
    CHECK(stability_dt(Potential::piecewise_quadratic(), -2, 2) == 0.25);
    double dt = stability_dt(Potential::smooth_demo(), -2, 2);
    CHECK(dt > 0.0);
    CHECK(dt < 0.5);
    CHECK(dt == doctest::Approx(1.0 / 24.0).epsilon(1e-6));
}

TEST_CASE("standing interface keeps its phases")
{
    auto pq = Potential::piecewise_quadratic();
    LatticeState s;
    s.first_index = -20;
    for (long j = -20; j <= 20; ++j) s.u.push_back(j < 0 ? 1.5 - 0.01 * double(j + 20) : -0.5 - 0.02 * j);
    EulerConfig cfg;
    cfg.dt0 = 0.1;
    cfg.t_end = 10.0;
    cfg.snapshot_times = {10.0};
    auto tr = run(s, pq, cfg, 1.0);
    const auto& u = tr.snapshots.back().u;
    for (std::size_t i = 0; i < u.size(); ++i) CHECK((u[i] >= 0) == (s.u[i] >= 0));
}

TEST_CASE("guarded run: energy decreases, mass is conserved, snapshots land exactly")
{
    auto sd = Potential::smooth_demo();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(-1.5, 1.5);
    LatticeState s;
    s.u.resize(101);
    for (double& x : s.u) x = ud(rng);
    const double eps = 0.02;
    EulerConfig cfg;
    cfg.dt0 = 1.0 / 24.0;
    cfg.t_end = 0.004 / (eps * eps);
    cfg.snapshot_times = {0.0, 0.001, 0.002, 0.004};
    auto tr = run(s, sd, cfg, eps);
    REQUIRE(tr.snapshots.size() == 4);
    CHECK(tr.snapshots[1].t == doctest::Approx(0.001 / (eps * eps)).epsilon(1e-14));
    for (std::size_t i = 1; i < tr.energies.size(); ++i) CHECK(tr.energies[i].second < tr.energies[i - 1].second);
    CHECK(tr.mass_drift <= 1e-9 * 101);
}

TEST_CASE("oversized steps are rejected by the guard")
{
    auto pq = Potential::piecewise_quadratic();
    EulerConfig cfg;
    cfg.dt0 = 3.0;  // far above the stability limit
    cfg.t_end = 30.0;
    auto tr = run(state({3, -1, -1, 0.5, -0.2}), pq, cfg, 1.0);
    CHECK(tr.rejected > 0);
    for (std::size_t i = 1; i < tr.energies.size(); ++i)
        CHECK(tr.energies[i].second <= tr.energies[i - 1].second + 1e-14 * std::abs(tr.energies[i - 1].second));
}

TEST_CASE("determinism")
{
    auto sd = Potential::smooth_demo();
    EulerConfig cfg;
    cfg.dt0 = 0.04;
    cfg.t_end = 4.0;
    cfg.snapshot_times = {0.5, 4.0};
    auto a = run(state({0.2, -0.1, 0.05, 0.3, -0.25}), sd, cfg, 1.0);
    auto b = run(state({0.2, -0.1, 0.05, 0.3, -0.25}), sd, cfg, 1.0);
    CHECK(a.snapshots.back().u == b.snapshots.back().u);
    CHECK(a.accepted == b.accepted);
}

TEST_CASE("config validation")
{
    EulerConfig cfg;
    cfg.safety = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.snapshot_times = {5.0};
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(run(state({1, 1, 1}), Potential::piecewise_quadratic(), cfg, 1.0), ConfigError);
}
