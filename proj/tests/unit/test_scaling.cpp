#include "fbd/errors.hpp"
#include "fbd/scaling.hpp"

#include <doctest.h>

#include <cmath>

using namespace fbd;
using namespace fbd::scaling;

TEST_CASE("profile constants")
{
    auto p = ProfileSpec::reference();
    CHECK(p.value(0.0) == 1.0);
    CHECK(p.value(-10.0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(p.value(10.0) == doctest::Approx(0.75).epsilon(1e-6));
    // One-sided slopes -a/l and -b/l.
    CHECK(p.kink() == doctest::Approx(-4.0 + 1.0));
    CHECK_NOTHROW(p.validate());

    ProfileSpec bad = p;
    bad.b = 2.5;
    CHECK_THROWS_AS(bad.validate(), DataError);
    ProfileSpec c;
    c.kind = ProfileSpec::Kind::custom;
    c.custom = [](double x) { return x < 0 ? 1.0 - 0.5 * x : 1.0 - 0.2 * std::tanh(x); };
    CHECK(c.kink() == doctest::Approx(-0.5 + 0.2).epsilon(1e-4));
    CHECK(profile_kind_from_string("standing") == ProfileSpec::Kind::standing);
    CHECK_THROWS_AS(profile_kind_from_string("zigzag"), ConfigError);
}

TEST_CASE("initial data satisfy the assumption inequalities")
{
    auto p = ProfileSpec::reference();
    auto d = build_initial_data(p, 0.02, 0.2);
    CHECK(d.alpha <= d.alpha_profile * (1 + 1e-9));
    CHECK(d.beta == doctest::Approx(std::abs(p.kink())).epsilon(0.1));
    CHECK(d.c_eps > 0.0);
    CHECK(d.c_eps <= 0.02);
    CHECK(si::check_membership(d.state.u, d.state.first_index, 1));
    // p = u - sgn(u) recovers the sampled profile plus c_eps.
    Vec pp = si::p_from_u(d.state.u);
    for (long j : {-20L, -1L, 0L, 1L, 30L})
        CHECK(pp[std::size_t(j - d.state.first_index)] == doctest::Approx(p.value(0.02 * j) + d.c_eps).epsilon(1e-12));
    CHECK_THROWS_AS(build_initial_data(p, 0.0, 0.2), DomainError);
}

TEST_CASE("standing data: no events, vacuous gap statistics, zero limit error")
{
    auto p = ProfileSpec::standing_default();
    std::vector<ScaledRun> runs{run_scaled(p, 0.1, 0.2, 10), run_scaled(p, 0.05, 0.2, 10)};
    for (const auto& r : runs) CHECK(r.run.log.events.empty());
    auto g = gap_statistics(runs);
    CHECK(g.d_star == 0.0);
    CHECK(g.K_bound_ok);
    CHECK(g.entries[0].K == 0);
}

TEST_CASE("embedding, regular-part bounds and the R split")
{
    kernel::KernelEvaluator kern;
    auto p = ProfileSpec::reference();
    const double eps = 0.05;
    auto r = run_scaled(p, eps, 0.2, 40);
    REQUIRE(r.run.log.events.size() >= 2);

    auto b = regular_part_bounds(r, kern);
    CHECK(b.violations == 0);
    CHECK(b.checkpoints > 0);

    auto emb = build_embeddings(r, kern);
    CHECK(emb.max_decomposition_residual <= 1e-6);
    // xi* jumps by eps at each event.
    for (std::size_t n = 0; n < emb.event_tau.size(); ++n) {
        double before = emb.xi_star(std::nextafter(emb.event_tau[n], 0.0));
        CHECK(emb.xi_star(emb.event_tau[n]) - before == doctest::Approx(eps));
    }
    // Q is the Neumann heat flow of p0: compare against the spectral solver.
    auto heat = si::inter_event_integrator(r.data.p0, emb.first_index, r.data.state.last_index() + 1,
                                           {r.run.snapshots[10].t}, si::InterEventMethod::spectral, kern);
    double dq = 0.0;
    for (std::size_t j = 0; j < emb.Q[10].size(); ++j) dq = std::max(dq, std::abs(emb.Q[10][j] - heat.states[0][j]));
    CHECK(dq <= 1e-9);

    auto gaps = gap_statistics({r});
    REQUIRE(gaps.d_star > 0.0);
    auto sf = split_R(r, emb, 0.9 * gaps.d_star, kern);
    CHECK(sf.sup_R2 <= 2.0 + 1e-9);
    CHECK(sf.R2_outside <= 1e-10);
    CHECK(sf.interface_condition <= 1e-6);
    CHECK(sf.R2_L1 > 0.0);
    for (std::size_t n = 0; n < emb.tau.size(); ++n) {
        if (emb.tau[n] >= emb.event_tau.front()) break;
        for (std::size_t j = 0; j < sf.R1[n].size(); ++j) {
            CHECK(sf.R1[n][j] == 0.0);
            CHECK(sf.R2[n][j] == 0.0);
        }
    }
    CHECK_THROWS_AS(split_R(r, emb, 10.0, kern), MarginError);

    auto h = holder_diagnostics(emb, sf);
    CHECK(h.xi_lipschitz <= eps / (2.0 * gaps.d_star * eps) + eps);
    CHECK(std::isfinite(h.Q_time));
}

TEST_CASE("event solver and explicit Euler agree")
{
    auto c = euler_cross_check(ProfileSpec::reference(), 0.1, 20.0, 1e-3);
    CHECK(c.events >= 1);
    CHECK(c.sup_distance <= 1e-2);
}

TEST_CASE("log-log slope")
{
    CHECK(loglog_slope({1, 2, 4, 8}, {3, 6, 12, 24}) == doctest::Approx(1.0));
    CHECK(loglog_slope({1, 10}, {1, 0.01}) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), DomainError);
}

TEST_CASE("sweep and limit comparison")
{
    kernel::KernelEvaluator kern;
    auto sw = run_sweep(ProfileSpec::sweep(), {0.1, 0.05}, 0.3, kern, 30);
    CHECK(sw.gaps.d_star > 0.0);
    CHECK(sw.d_split == doctest::Approx(0.9 * sw.gaps.d_star));
    REQUIRE(sw.splits.size() == 2);
    CHECK(sw.R2_L1_slope == doctest::Approx(1.0).epsilon(0.3));
    auto lim = solve_limit(ProfileSpec::sweep(), 0.3, 0.01, 3.0, 60);
    auto cmp = compare_to_limit(sw.embeddings, sw.splits, lim);
    REQUIRE(cmp.xi_error.size() == 2);
    CHECK(cmp.xi_error[1] < cmp.xi_error[0]);
    for (double m : cmp.min_P) CHECK(m >= -1.0 - 0.1);
    for (double m : cmp.max_P_right) CHECK(m <= 1.0 + 0.1);
}
