#include "fbd/errors.hpp"
#include "fbd/potential.hpp"

#include <doctest.h>

#include <cmath>

using namespace fbd;

TEST_CASE("piecewise-quadratic values")
{
    auto p = Potential::piecewise_quadratic();
    CHECK(p.phi(1.0) == 0.0);
    CHECK(p.phi(-1.0) == 0.0);
    CHECK(p.phi(0.0) == doctest::Approx(0.5));
    CHECK(p.dphi(3.0) == 2.0);
    CHECK(p.dphi(-1.0) == 0.0);
    CHECK(p.dphi(0.0) == -1.0);  // sgn(0) = +1
    CHECK(p.u_hash_hi() == 2.0);
    CHECK(p.u_hash_lo() == -2.0);
    CHECK(p.p_star_hi() == 1.0);
    CHECK(p.p_star_lo() == -1.0);
}

TEST_CASE("smooth-demo critical values")
{
    auto p = Potential::smooth_demo();
    // Independent oracle: Phi'' = 4 - 16 (1 - 3u^2) / (1+u^2)^3 vanishes at u^*.
    double us = p.u_star_hi();
    double d = 1.0 + us * us;
    CHECK(std::abs(4.0 - 16.0 * (1.0 - 3.0 * us * us) / (d * d * d)) < 1e-9);
    CHECK(us == doctest::Approx(0.43834).epsilon(1e-4));
    CHECK(p.u_star_lo() == doctest::Approx(-us));
    CHECK(p.p_star_hi() == doctest::Approx(3.18150).epsilon(1e-4));
    CHECK(p.p_star_lo() == doctest::Approx(-p.p_star_hi()));
    CHECK(p.u_hash_hi() == doctest::Approx(1.41979).epsilon(1e-4));
    CHECK(p.dphi(p.u_hash_hi()) == doctest::Approx(p.p_star_hi()).epsilon(1e-10));
    CHECK(p.dphi(1.0) == doctest::Approx(0.0));
    CHECK(p.phi(0.0) == doctest::Approx(2.0));
    CHECK(p.max_curvature(-2.0, 2.0) == doctest::Approx(12.0).epsilon(1e-6));
}

TEST_CASE("branch inverses round-trip")
{
    auto p = Potential::smooth_demo();
    for (double q : {-3.0, -1.0, 0.0, 1.5, 3.0}) {
        auto a = p.branch_minus(q);
        auto b = p.branch_plus(q);
        REQUIRE(a);
        REQUIRE(b);
        CHECK(*a <= p.u_star_lo() + 1e-12);
        CHECK(*b >= p.u_star_hi() - 1e-12);
        CHECK(p.dphi(*a) == doctest::Approx(q).epsilon(1e-9));
        CHECK(p.dphi(*b) == doctest::Approx(q).epsilon(1e-9));
    }
    CHECK_FALSE(p.branch_minus(p.p_star_hi() + 1.0));
    CHECK_FALSE(p.branch_plus(p.p_star_lo() - 1.0));
}

TEST_CASE("custom potential locates spinodal points")
{
    // Phi = (u^2 - 1)^2 / 4: spinodal at +-1/sqrt(3).
    auto p = Potential::custom([](double u) { return 0.25 * (u * u - 1) * (u * u - 1); },
                               [](double u) { return u * u * u - u; }, {}, -2.0, 2.0);
    CHECK(p.u_star_hi() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-8));
    CHECK(p.u_star_lo() == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-8));
    CHECK(p.p_star_hi() == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-8));
    CHECK(p.u_hash_hi() == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-8));
    CHECK_THROWS_AS(Potential::custom({}, {}, {}, -1, 1), ConfigError);
}

TEST_CASE("bisect")
{
    CHECK(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, 0.0, 1.0), DomainError);
}
