#include "fbd/errors.hpp"
#include "fbd/experiments.hpp"

#include <doctest.h>

#include <cmath>

using namespace fbd;
using namespace fbd::experiments;

TEST_CASE("running median and labels")
{
    CHECK(running_median({1, 9, 2, 3, 4}, 3) == Vec{1, 2, 3, 3, 4});
    CHECK_THROWS_AS(running_median({1, 2}, 2), ConfigError);
    auto pot = Potential::smooth_demo();
    // The lone flipped site is smoothed away; the median then places the
    // change between sites 4 and 5.
    Vec u{1, 1, 1, -1, 1, 1, -1, -1, -1, -1};
    auto xs = interface_positions(u, 0, 0.1, pot);
    REQUIRE(xs.size() == 1);
    CHECK(xs[0] == doctest::Approx(0.45));
}

TEST_CASE("two-point support distance")
{
    auto pot = Potential::smooth_demo();
    Vec u{*pot.branch_plus(1.0), *pot.branch_minus(1.0), 0.0};
    CHECK(two_point_support_distance(u, 0, 1.0, pot, 0.0, 1.0) < 1e-9);
    // u = 0 is on neither stable branch of p = 0.
    CHECK(two_point_support_distance(u, 0, 1.0, pot, 0.0, 2.0) > 0.5);
    CHECK(spinodal_penetration(u, pot) == doctest::Approx(pot.u_star_hi()));
    CHECK(spinodal_penetration({1.5, -1.5}, pot) == 0.0);
}

TEST_CASE("unknown preset")
{
    CHECK_THROWS_AS(preset_params("nope"), ConfigError);
    CHECK_THROWS_AS(general_phi_experiment("nope"), ConfigError);
    CHECK(preset_names().size() == 6);
}

TEST_CASE("preset data are seeded and deterministic")
{
    auto pot = Potential::smooth_demo();
    auto p = preset_params("transient-spinodal");
    auto a = preset_initial("transient-spinodal", p, pot);
    auto b = preset_initial("transient-spinodal", p, pot);
    CHECK(a.u == b.u);
    CHECK(a.u.size() == 101);
    p.seed = 99;
    CHECK(preset_initial("transient-spinodal", p, pot).u != a.u);
    for (double v : a.u) CHECK((v > pot.u_star_lo() && v < pot.u_star_hi()));
}

TEST_CASE("transient presets")
{
    for (const char* name : {"transient-two-phase", "transient-spinodal", "type-II"}) {
        auto r = general_phi_experiment(name);
        for (const auto& c : r.checks) {
            INFO(name << ": " << c.name << " = " << c.value);
            CHECK(c.passed);
        }
    }
}

TEST_CASE("annihilation preset")
{
    auto r = general_phi_experiment("annihilation");
    CHECK(r.passed());
    CHECK(r.metrics.at("collision_tau") == doctest::Approx(0.18).epsilon(0.05 / 0.18));
}
