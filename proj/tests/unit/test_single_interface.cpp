#include "fbd/errors.hpp"
#include "fbd/single_interface.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

using namespace fbd;
using namespace fbd::si;

namespace {

// Random data in X_1 on j = -L..L: u > 2 on the left, -0.6 < u < 0 on the right.
LatticeState random_x1(std::mt19937_64& rng, long L, double D)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LatticeState s;
    s.first_index = -L;
    for (long j = -L; j <= L; ++j)
        s.u.push_back(j <= 0 ? 2.0 + (D - 2.0) * (0.3 + 0.7 * unit(rng)) : -0.6 + 0.55 * unit(rng));
    return s;
}

} // namespace

TEST_CASE("membership")
{
    CHECK(check_membership({1, 1, -1, -1}, -2, 0));
    CHECK_FALSE(check_membership({1, 0, -1, -1}, -2, 0));
    CHECK_FALSE(check_membership({1, 1, -2.5, -1}, -2, 0));
    CHECK(interface_index({1, 1, -1, -1}, -2) == 0);
}

TEST_CASE("linear rhs agrees with the lattice rhs on X_k")
{
    auto pq = Potential::piecewise_quadratic();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        LatticeState s;
        s.first_index = -5;
        long k = -3 + long(rep % 7);
        for (long j = -5; j <= 5; ++j) s.u.push_back(j < k ? 0.01 + 3.0 * unit(rng) : -1.99 + 1.98 * unit(rng));
        Vec a = linear_rhs(s.u, s.first_index, k);
        Vec b = rhs(s, pq);
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    CHECK(worst <= 1e-14);

    // Affine data: only the delta terms survive.
    Vec r = linear_rhs({5, 4, 3, -0.1, -0.2, -0.3}, 0, 3);
    CHECK(r[2] == doctest::Approx(2.0 + (-0.1 - 6.0 + 4.0)));
    CHECK_THROWS_AS(linear_rhs({1, -1, 1}, 0, 1), PhaseConsistencyError);
}

TEST_CASE("Neumann modes round-trip")
{
    NeumannModes modes(9);
    Vec v{1, -2, 3, 0.5, 0, 7, -1, 2, 4};
    Vec back = modes.synthesize(modes.project(v));
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));
    CHECK(modes.lambda(0) == 0.0);
    CHECK(modes.lambda(8) == doctest::Approx(-4.0 * std::pow(std::sin(M_PI * 8 / 18.0), 2)));
}

TEST_CASE("image sum matches its definition")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t M : {3u, 7u, 20u}) {
        for (std::size_t R : {2u, 9u, 45u}) {
            Vec w(R + 1), x(M);
            for (double& v : w) v = unit(rng);
            for (double& v : x) v = unit(rng);
            auto W = [&](long n) { return std::abs(n) <= long(R) ? w[std::size_t(std::abs(n))] : 0.0; };
            Vec y = apply_neumann_images(w, x);
            const long L = long(M), span = long(R) / (2 * L) + 2;
            for (long j = 0; j < L; ++j) {
                double s = 0.0;
                for (long i = 0; i < L; ++i)
                    for (long n = -span; n <= span; ++n)
                        s += (W(j - i + 2 * n * L) + W(j + i + 1 + 2 * n * L)) * x[std::size_t(i)];
                CHECK(y[std::size_t(j)] == doctest::Approx(s).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("inter-event methods")
{
    kernel::KernelEvaluator kern;
    // Pure heat flow from 1 + delta: u_j(t) = 1 + g_j(t) while the window is wide.
    const long L = 60;
    Vec u0(2 * L + 1, 1.0);
    u0[L] = 2.0;
    auto out = inter_event_integrator(u0, -L, L + 1, {0.0, 2.5, 7.0}, InterEventMethod::spectral, kern);
    for (long j = -5; j <= 5; ++j)
        CHECK(out.states[2][std::size_t(j + L)] == doctest::Approx(1.0 + kern.g(j, 7.0)).epsilon(1e-12));

    Vec c(21, 0.7);
    auto cst = inter_event_integrator(c, 0, 21, {3.0}, InterEventMethod::duhamel, kern);
    for (double v : cst.states[0]) CHECK(v == doctest::Approx(0.7));

    std::mt19937_64 rng(9);
    auto s = random_x1(rng, 15, 3.0);
    double diff = cross_check_methods(s.u, s.first_index, 1, {0.0, 1.0, 5.0}, kern, 1e-8);
    CHECK(diff <= 1e-8);
}

TEST_CASE("randomized X_1 runs satisfy the transition invariants")
{
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 5; ++rep) {
        double D = 3.0 + 0.8 * rep / 4.0;
        auto s = random_x1(rng, 40, D);
        auto run = run_single_interface(s, 40.0, {10.0, 40.0});
        REQUIRE(!run.log.events.empty());
        auto chk = check_log(run.log);
        CHECK(chk.ok());
        CHECK(chk.min_u_left_margin > 0.0);
        CHECK(chk.max_jump_error <= 1e-8);
        CHECK(chk.min_gap_margin >= -1e-8);
        for (const auto& snap : run.snapshots) CHECK(*std::max_element(snap.u.begin(), snap.u.end()) <= D + 1e-12);
    }
}

TEST_CASE("standing data never transitions")
{
    LatticeState s;
    s.first_index = -30;
    for (long j = -30; j <= 30; ++j) s.u.push_back(j <= 0 ? 1.9 - 0.01 * std::abs(double(j)) : -0.5);
    auto run = run_single_interface(s, 200.0, {200.0});
    CHECK(run.log.events.empty());
}

TEST_CASE("minimal gap")
{
    CHECK(std::isinf(minimal_gap(2.0)));
    CHECK(minimal_gap(3.0) == doctest::Approx(0.5 * std::log(5.0)));
}

TEST_CASE("decomposition is exact and r jumps by -2")
{
    kernel::KernelEvaluator kern;
    std::mt19937_64 rng(77);
    auto s = random_x1(rng, 40, 3.2);
    Vec times;
    for (int i = 1; i <= 20; ++i) times.push_back(1.5 * i);
    auto run = run_single_interface(s, 30.0, times);
    REQUIRE(!run.log.events.empty());
    Vec p0 = p_from_u(s.u);
    auto dec = decompose(run, p0, kern);
    CHECK(dec.times.size() == 20);
    CHECK(dec.max_residual <= 1e-6);

    // Before the first event r = 0.
    const auto& e = run.log.events.front();
    Vec r0 = singular_part(run.log, s.first_index, s.u.size(), 0.5 * e.t_star, kern);
    for (double v : r0) CHECK(v == 0.0);
    std::size_t ik = std::size_t(e.k - s.first_index);
    Vec after = singular_part(run.log, s.first_index, s.u.size(), e.t_star + 1e-9, kern);
    CHECK(after[ik] == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("p from u uses sgn(0) = +1")
{
    CHECK(p_from_u({0.0, 2.0, -0.5}) == Vec{-1.0, 1.0, 0.5});
}
