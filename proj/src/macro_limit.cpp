#include "fbd/macro_limit.hpp"

#include "fbd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbd::macro {

void GridParams::validate() const
{
    if (!(xi_max > xi_min)) throw ConfigError("macro grid: empty domain");
    if (!(dxi > 0.0)) throw ConfigError("macro grid: dxi must be positive");
    if (!(cfl > 0.0 && cfl <= 0.5)) {
        std::ostringstream os;
        os << "macro grid: explicit step needs dtau <= dxi^2 / 2, got cfl=" << cfl;
        throw ConfigError(os.str());
    }
    if (!(tau_end > 0.0)) throw ConfigError("macro grid: tau_end must be positive");
    if (n_out < 1) throw ConfigError("macro grid: n_out must be >= 1");
}

MacroSolution solve_fbp(const std::function<double(double)>& P0, double xi0, const GridParams& grid_in)
{
    grid_in.validate();
    GridParams grid = grid_in;
    const long Nc = std::lround((grid.xi_max - grid.xi_min) / grid.dxi);
    if (Nc < 5) throw ConfigError("macro grid: fewer than 5 cells");
    grid.dxi = (grid.xi_max - grid.xi_min) / double(Nc);
    const double dxi = grid.dxi;
    if (!(xi0 > grid.xi_min + 2 * dxi && xi0 < grid.xi_max - 3 * dxi)) throw DataError("solve_fbp: xi0 too close to the boundary");

    MacroSolution sol;
    sol.grid = grid;
    sol.xi_grid.resize(Nc);
    for (long i = 0; i < Nc; ++i) sol.xi_grid[i] = grid.xi_min + (double(i) + 0.5) * dxi;

    long I = long(std::floor((xi0 - grid.xi_min) / dxi));
    double frac = (xi0 - (grid.xi_min + double(I) * dxi)) / dxi;
    if (frac > 1.0 - 1e-12) {
        ++I;
        frac = 0.0;
    }
    double m = 2.0 * frac - 1.0;  // absorbed content of cell I, in [-1, 1]

    Vec P(Nc), U(Nc);
    for (long i = 0; i < Nc; ++i) {
        double x = sol.xi_grid[i];
        P[i] = P0(x);
        if (!std::isfinite(P[i])) throw DataError("solve_fbp: non-finite initial profile");
        if (x < xi0 && !(P[i] > -1.0)) throw DataError("solve_fbp: P0 <= -1 left of the interface");
        if (x > xi0 && !(P[i] > -1.0 && P[i] <= 1.0 + 1e-12)) throw DataError("solve_fbp: P0 outside (-1, 1] right of the interface");
        double mu = i < I ? 1.0 : (i > I ? -1.0 : m);
        U[i] = P[i] + mu;
    }

    // Output times land exactly on tau_end * n / n_out.
    const double out_dt = grid.tau_end / grid.n_out;
    const long sub = std::max<long>(1, long(std::ceil(out_dt / (grid.cfl * dxi * dxi) - 1e-9)));
    const double dtau = out_dt / double(sub);
    const double lambda = dtau / (dxi * dxi);
    sol.trace.dtau = dtau;

    auto xi_star = [&] { return grid.xi_min + double(I) * dxi + dxi * (m + 1.0) / 2.0; };
    auto record_output = [&](double tau) {
        sol.tau_grid.push_back(tau);
        sol.P.push_back(P);
        Vec mu(Nc), u(U);
        double xs = xi_star();
        for (long i = 0; i < Nc; ++i) mu[i] = sol.xi_grid[i] < xs ? 1.0 : -1.0;
        sol.mu.push_back(std::move(mu));
        sol.U.push_back(std::move(u));
        sol.xi_star.push_back(xs);
    };
    auto record_trace = [&](double tau, double p_trial) {
        sol.trace.tau.push_back(tau);
        sol.trace.xi_star.push_back(xi_star());
        sol.trace.slope_left.push_back(I >= 2 ? (P[I - 1] - P[I - 2]) / dxi : NAN);
        sol.trace.slope_right.push_back(I + 2 < Nc ? (P[I + 2] - P[I + 1]) / dxi : NAN);
        sol.trace.p_interface.push_back(P[I]);
        sol.trace.p_trial.push_back(p_trial);
    };

    sol.min_P = *std::min_element(P.begin(), P.end());
    sol.max_P_right = -INFINITY;
    for (long i = I + 1; i < Nc; ++i) sol.max_P_right = std::max(sol.max_P_right, P[i]);
    record_output(0.0);
    record_trace(0.0, P[I]);

    Vec lap(Nc);
    const long total = sub * grid.n_out;
    for (long step = 1; step <= total; ++step) {
        double mass_before = 0.0;
        for (double x : U) mass_before += x;
        for (long i = 0; i < Nc; ++i) {
            double l = i > 0 ? P[i - 1] : P[i];
            double r = i + 1 < Nc ? P[i + 1] : P[i];
            lap[i] = l - 2.0 * P[i] + r;
        }
        double mass_after = 0.0;
        for (long i = 0; i < Nc; ++i) {
            U[i] += lambda * lap[i];
            mass_after += U[i];
        }
        sol.max_conservation_error = std::max(sol.max_conservation_error, std::abs(mass_after - mass_before) * dxi);

        for (long i = 0; i < Nc; ++i)
            if (i != I) P[i] = U[i] - (i < I ? 1.0 : -1.0);
        double p_trial = U[I] - m;
        // Relay: the interface cell holds P <= 1 by absorbing latent content.
        for (;;) {
            P[I] = U[I] - m;
            if (P[I] <= 1.0) break;
            double target = U[I] - 1.0;
            if (target < 1.0) {
                m = target;
                P[I] = 1.0;
                break;
            }
            m = 1.0;
            P[I] = U[I] - 1.0;
            ++sol.relay_advances;
            if (++I >= Nc - 2) throw DataError("solve_fbp: interface reached the right boundary");
            m = -1.0;
        }

        const double tau = double(step) * dtau;
        sol.min_P = std::min(sol.min_P, *std::min_element(P.begin(), P.end()));
        for (long i = I + 1; i < Nc; ++i) sol.max_P_right = std::max(sol.max_P_right, P[i]);
        record_trace(tau, p_trial);
        if (step % sub == 0) record_output(double(step / sub) * out_dt);
    }
    return sol;
}

Vec stefan_residual(const MacroSolution& sol, int window)
{
    const auto& tr = sol.trace;
    const long n = long(tr.tau.size());
    const long h = std::max(1, window / 2);
    Vec out(n, NAN);
    for (long k = h; k + h < n; ++k) {
        double v = (tr.xi_star[k + h] - tr.xi_star[k - h]) / (2.0 * double(h) * tr.dtau);
        double jump = 0.0;
        for (long i = k - h; i <= k + h; ++i) jump += tr.slope_right[i] - tr.slope_left[i];
        jump /= double(2 * h + 1);
        out[k] = std::abs(2.0 * v - jump);
    }
    return out;
}

double stefan_residual_mean(const MacroSolution& sol, double tau_lo, double tau_hi, int window)
{
    Vec r = stefan_residual(sol, window);
    double acc = 0.0;
    long cnt = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        double t = sol.trace.tau[k];
        if (t < tau_lo || t > tau_hi || !std::isfinite(r[k])) continue;
        acc += r[k];
        ++cnt;
    }
    return cnt ? acc / double(cnt) : NAN;
}

Vec hilpert_contraction(const MacroSolution& a, const MacroSolution& b)
{
    if (a.xi_grid.size() != b.xi_grid.size() || a.tau_grid.size() != b.tau_grid.size() ||
        std::abs(a.grid.dxi - b.grid.dxi) > 1e-14 || std::abs(a.grid.xi_min - b.grid.xi_min) > 1e-14 ||
        std::abs(a.grid.tau_end - b.grid.tau_end) > 1e-14)
        throw ConfigError("hilpert_contraction: solutions live on different grids");
    Vec m(a.tau_grid.size());
    for (std::size_t n = 0; n < m.size(); ++n) {
        double l1 = 0.0;
        for (std::size_t i = 0; i < a.xi_grid.size(); ++i) l1 += std::abs(a.P[n][i] - b.P[n][i]);
        m[n] = l1 * a.grid.dxi + 2.0 * std::abs(a.xi_star[n] - b.xi_star[n]);
    }
    return m;
}

double contraction_ratio(const Vec& m)
{
    double worst = 0.0, run_min = INFINITY;
    for (double x : m) {
        if (run_min < INFINITY) worst = std::max(worst, run_min > 0.0 ? x / run_min : (x > 0.0 ? INFINITY : 1.0));
        run_min = std::min(run_min, x);
    }
    return m.size() < 2 ? 1.0 : worst;
}

namespace {

struct Bump {
    double c, r;
    double f(double x) const
    {
        double s = (x - c) / r;
        if (std::abs(s) >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - s * s));
    }
};

} // namespace

std::vector<BumpTest> default_test_functions(const MacroSolution& sol)
{
    const double T = sol.grid.tau_end;
    const double tc = 0.5 * T;
    const double xs = xi_star_at(sol, tc);
    const double lo = sol.grid.xi_min, hi = sol.grid.xi_max;
    std::vector<BumpTest> tests;
    const double scales[3][2] = {{0.45, 0.5}, {0.25, 0.2}, {0.12, 0.08}};
    for (auto& s : scales) {
        double rt = s[0] * T, rx = s[1];
        tests.push_back({tc, rt, xs, rx});
        double away = xs - 0.6;
        if (away - rx > lo && away + rx < xs) tests.push_back({tc, rt, away, rx});
        away = xs + 0.6;
        if (away + rx < hi && away - rx > xi_star_at(sol, T)) tests.push_back({tc, rt, away, rx});
    }
    return tests;
}

double distributional_residual(const MacroSolution& sol, const std::vector<BumpTest>& tests)
{
    // Discrete weak form: the time derivative is moved onto psi over the dual
    // cells [tau_{n-1/2}, tau_{n+1/2}] and the space derivative is the
    // second difference of the sampled bump, so constants integrate to 0.
    const std::size_t nt = sol.tau_grid.size();
    const std::size_t nx = sol.xi_grid.size();
    const double dxi = sol.grid.dxi;
    double worst = 0.0;
    for (const auto& t : tests) {
        Bump bt{t.tau_c, t.tau_r}, bx{t.xi_c, t.xi_r};
        Vec fx(nx), d2x(nx);
        for (std::size_t i = 0; i < nx; ++i) fx[i] = bx.f(sol.xi_grid[i]);
        for (std::size_t i = 0; i < nx; ++i) {
            double l = i > 0 ? fx[i - 1] : fx[i], r = i + 1 < nx ? fx[i + 1] : fx[i];
            d2x[i] = (l - 2.0 * fx[i] + r) / (dxi * dxi);
        }
        double acc = 0.0;
        for (std::size_t n = 0; n < nt; ++n) {
            const auto& tg = sol.tau_grid;
            double a = n == 0 ? tg[0] : 0.5 * (tg[n - 1] + tg[n]);
            double b = n + 1 == nt ? tg[n] : 0.5 * (tg[n] + tg[n + 1]);
            double dpsi = bt.f(b) - bt.f(a), ft = bt.f(tg[n]);
            if (dpsi == 0.0 && ft == 0.0) continue;
            double sx = 0.0;
            for (std::size_t i = 0; i < nx; ++i) sx += sol.U[n][i] * dpsi * fx[i] + sol.P[n][i] * (b - a) * ft * d2x[i];
            acc += sx * dxi;
        }
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

double xi_star_at(const MacroSolution& sol, double tau)
{
    const auto& tg = sol.tau_grid;
    if (tau <= tg.front()) return sol.xi_star.front();
    if (tau >= tg.back()) return sol.xi_star.back();
    auto it = std::upper_bound(tg.begin(), tg.end(), tau);
    std::size_t n = std::size_t(it - tg.begin());
    double w = (tau - tg[n - 1]) / (tg[n] - tg[n - 1]);
    return (1.0 - w) * sol.xi_star[n - 1] + w * sol.xi_star[n];
}

double P_at(const MacroSolution& sol, std::size_t n, double xi)
{
    const auto& xg = sol.xi_grid;
    const auto& P = sol.P.at(n);
    if (xi <= xg.front()) return P.front();
    if (xi >= xg.back()) return P.back();
    double s = (xi - xg.front()) / sol.grid.dxi;
    std::size_t i = std::min<std::size_t>(std::size_t(s), xg.size() - 2);
    double w = s - double(i);
    return (1.0 - w) * P[i] + w * P[i + 1];
}

} // namespace fbd::macro
