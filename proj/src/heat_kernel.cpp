#include "fbd/heat_kernel.hpp"

#include "fbd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace fbd::kernel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("heat kernel: time must be finite and >= 0, got " + std::to_string(t));
}

// rho(k) = 2 - 2 cos k, written with sin to keep small k accurate.
double rho(int m, int M)
{
    double s = std::sin(std::numbers::pi * m / M);
    return 4.0 * s * s;
}

template <class Weight>
std::vector<double> trapezoid_row(long jmax, int M, Weight weight)
{
    std::vector<double> cos_table(M);
    for (int r = 0; r < M; ++r) cos_table[r] = std::cos(kTwoPi * r / M);
    std::vector<double> out(jmax + 1, 0.0);
    // m and M - m carry the same weight; fold them.
    for (int m = 0; m <= M / 2; ++m) {
        double w = weight(m);
        if (w == 0.0) continue;
        double mult = (m == 0 || 2 * m == M) ? 1.0 : 2.0;
        w *= mult;
        long r = 0;
        for (long j = 0; j <= jmax; ++j) {
            out[j] += w * cos_table[r];
            r += m;
            if (r >= M) r -= M;
        }
    }
    for (double& v : out) v /= M;
    return out;
}

} // namespace

std::string to_string(Method m)
{
    return m == Method::fourier_quadrature ? "fourier-quadrature" : "bessel-series";
}

double asymptotic_switch() { return 1e6; }

long truncation_radius(double t)
{
    check_time(t);
    return static_cast<long>(std::ceil(11.0 * std::sqrt(t))) + 50;
}

int quadrature_points(double t, long jmax)
{
    check_time(t);
    double m = 2.0 * double(jmax) + std::ceil(std::sqrt(160.0 * t)) + 64.0;
    if (m > 2e8) throw DomainError("heat kernel: quadrature size too large");
    return static_cast<int>(m);
}

double g_asymptotic(long j, double t)
{
    check_time(t);
    if (t == 0.0) return j == 0 ? 1.0 : 0.0;
    double x = double(j);
    return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(std::numbers::pi * t));
}

std::vector<double> bessel_row(double t, long jmax)
{
    check_time(t);
    if (jmax < 0) throw DomainError("bessel_row: negative jmax");
    std::vector<double> out(jmax + 1, 0.0);
    if (t == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (t > asymptotic_switch()) {
        for (long j = 0; j <= jmax; ++j) out[j] = g_asymptotic(j, t);
        return out;
    }
    const double x = 2.0 * t;
    // Contamination by the dominant solution decays like exp((n^2 - N^2)/x).
    const long N = jmax + static_cast<long>(std::ceil(std::sqrt(80.0 * x))) + 40;
    double f_next = 0.0;  // f_{n+1}
    double f = 1.0;       // f_n
    double tail = 0.0;    // sum_{m >= n+1} f_m
    for (long n = N; n >= 1; --n) {
        if (n <= jmax) out[n] = f;
        tail += f;
        double f_prev = f_next + (2.0 * double(n) / x) * f;
        f_next = f;
        f = f_prev;
        if (std::abs(f) > 1e250) {
            f *= 1e-250;
            f_next *= 1e-250;
            tail *= 1e-250;
            for (long m = std::max<long>(n, 1); m <= jmax; ++m) out[m] *= 1e-250;
        }
    }
    out[0] = f;
    // sum_{j in Z} g_j = 1 fixes the normalization.
    const double total = f + 2.0 * tail;
    for (double& v : out) v /= total;
    return out;
}

std::vector<double> fourier_row(double t, long jmax, int points)
{
    check_time(t);
    if (jmax < 0) throw DomainError("fourier_row: negative jmax");
    if (t == 0.0) {
        // The trapezoid sums of cos(jk) vanish exactly, up to round-off.
        std::vector<double> out(jmax + 1, 0.0);
        out[0] = 1.0;
        return out;
    }
    if (t > asymptotic_switch()) {
        std::vector<double> out(jmax + 1);
        for (long j = 0; j <= jmax; ++j) out[j] = g_asymptotic(j, t);
        return out;
    }
    int M = points > 0 ? points : quadrature_points(t, jmax);
    return trapezoid_row(jmax, M, [&](int m) {
        double a = rho(m, M) * t;
        return a > 745.0 ? 0.0 : std::exp(-a);
    });
}

std::vector<double> fourier_integral_row(double t, long jmax, int points)
{
    check_time(t);
    if (jmax < 0) throw DomainError("fourier_integral_row: negative jmax");
    int M = points > 0 ? points : quadrature_points(t, jmax);
    return trapezoid_row(jmax, M, [&](int m) {
        if (m == 0) return t;
        double r = rho(m, M);
        return -std::expm1(-r * t) / r;
    });
}

std::vector<double> KernelSource::row(double t, long jmax) const
{
    std::vector<double> out(jmax + 1);
    for (long j = 0; j <= jmax; ++j) out[j] = g(j, t);
    return out;
}

double KernelSource::g_dot(long j, double t) const
{
    return g(j + 1, t) + g(j - 1, t) - 2.0 * g(j, t);
}

KernelEvaluator::KernelEvaluator(Method method, int quadrature_points, bool cache)
    : method_(method), points_(quadrature_points), use_cache_(cache)
{
    if (quadrature_points < 0) throw ConfigError("kernel: quadrature_points must be >= 0");
}

double KernelEvaluator::g(long j, double t) const
{
    check_time(t);
    j = std::abs(j);
    if (use_cache_) {
        std::shared_lock lock(mutex_);
        auto it = cache_.find({j, t});
        if (it != cache_.end()) return it->second;
    }
    double v = method_ == Method::bessel_series ? bessel_row(t, j)[j] : fourier_row(t, j, points_)[j];
    if (use_cache_) {
        std::unique_lock lock(mutex_);
        cache_.emplace(std::make_pair(j, t), v);
    }
    return v;
}

double KernelEvaluator::g_integral(long j, double t) const
{
    // Both methods share the quadrature here; the Bessel path has no closed form.
    return fourier_integral_row(t, std::abs(j), points_)[std::abs(j)];
}

std::vector<double> KernelEvaluator::row(double t, long jmax) const
{
    return method_ == Method::bessel_series ? bessel_row(t, jmax) : fourier_row(t, jmax, points_);
}

std::vector<double> KernelEvaluator::integral_row(double t, long jmax) const
{
    return fourier_integral_row(t, jmax, points_);
}

std::size_t KernelEvaluator::cache_size() const
{
    std::shared_lock lock(mutex_);
    return cache_.size();
}

long grid_index(double xi, double eps)
{
    if (!(eps > 0.0)) throw DomainError("kernel embedding: eps must be positive");
    double s = xi / eps;
    double j = std::round(s);
    if (std::abs(s - j) > 1e-9) throw DomainError("kernel embedding: xi=" + std::to_string(xi) + " is not on the eps-grid");
    return static_cast<long>(j);
}

double G_eps(const KernelSource& k, double tau, double xi, double eps)
{
    long j = grid_index(xi, eps);
    return k.g(j, tau / (eps * eps));
}

double H_eps(const KernelSource& k, double tau, double xi, double eps, double d_star)
{
    if (!(d_star > 0.0)) throw DomainError("H_eps: d_star must be positive");
    long j = grid_index(xi, eps);
    if (tau <= 0.0) return 0.0;
    double knot = d_star * eps;
    if (tau >= knot) return k.g(j, tau / (eps * eps));
    return (tau / knot) * k.g(j, knot / (eps * eps));
}

namespace {

struct ViolationTally {
    double max_violation = -INFINITY;
    std::size_t count = 0;
    std::map<std::string, double>* worst = nullptr;

    void add(const std::string& name, double v)
    {
        max_violation = std::max(max_violation, v);
        if (v > 0.0) ++count;
        if (worst) {
            auto it = worst->find(name);
            if (it == worst->end())
                worst->emplace(name, v);
            else
                it->second = std::max(it->second, v);
        }
    }
};

double second_divided(double t0, double t1, double t2, double f0, double f1, double f2)
{
    return 2.0 * ((f2 - f1) / (t2 - t1) - (f1 - f0) / (t1 - t0)) / (t2 - t0);
}

std::vector<double> sorted_unique(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

MonotonicityReport verify_monotonicity(const KernelSource& k, const std::vector<double>& t_grid)
{
    auto ts = sorted_unique(t_grid);
    MonotonicityReport rep;
    ViolationTally tally;
    tally.worst = &rep.worst;
    const std::size_t n = ts.size();
    std::vector<double> g0(n), ig(n), gd(n);
    for (std::size_t i = 0; i < n; ++i) {
        g0[i] = k.g(0, ts[i]);
        ig[i] = k.g_integral(0, ts[i]);
        gd[i] = k.g_dot(0, ts[i]);
        tally.add("g0 > 0", -g0[i]);
        if (ts[i] > 0.0) tally.add("int g0 > 0", -ig[i]);
        tally.add("gdot0 < 0", gd[i]);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        tally.add("g0 decreasing", g0[i + 1] - g0[i]);
        tally.add("int g0 increasing", ig[i] - ig[i + 1]);
        tally.add("gdot0 increasing", gd[i] - gd[i + 1]);
    }
    for (std::size_t i = 0; i + 2 < n; ++i) {
        tally.add("g0 convex", -second_divided(ts[i], ts[i + 1], ts[i + 2], g0[i], g0[i + 1], g0[i + 2]));
        tally.add("int g0 concave", second_divided(ts[i], ts[i + 1], ts[i + 2], ig[i], ig[i + 1], ig[i + 2]));
        tally.add("gdot0 concave", second_divided(ts[i], ts[i + 1], ts[i + 2], gd[i], gd[i + 1], gd[i + 2]));
    }
    rep.max_violation = n == 0 ? 0.0 : tally.max_violation;
    rep.violations = tally.count;
    return rep;
}

KernelBoundReport verify_decay(const KernelSource& k, const std::vector<double>& t_grid, long j_lo, long j_hi)
{
    if (j_lo > j_hi) std::swap(j_lo, j_hi);
    const long jabs = std::max(std::abs(j_lo), std::abs(j_hi));
    KernelBoundReport rep;
    ViolationTally tally;
    rep.fitted_c = INFINITY;
    for (double t : sorted_unique(t_grid)) {
        const long J = std::max(truncation_radius(t), jabs + 1);
        rep.truncation[t] = J;
        auto row = k.row(t, J + 1);
        auto at = [&](long j) { return row[std::abs(j)]; };
        const double g0 = row[0];
        const double gdot0 = 2.0 * (row[1] - row[0]);
        const double s = std::sqrt(1.0 + t);
        const double s3 = s * s * s;

        for (long j = j_lo; j <= j_hi; ++j) {
            double gj = at(j);
            double gdj = at(j + 1) + at(j - 1) - 2.0 * gj;
            tally.add("g_j >= 0", -gj);
            tally.add("g_j <= g_0", gj - g0);
            tally.add("|gdot_j| <= -gdot_0", std::abs(gdj) + gdot0);
            rep.fitted_C_dot = std::max(rep.fitted_C_dot, std::abs(gdj) * s3);
        }
        double mass = 0.0, grad = 0.0;
        for (long j = J; j >= 1; --j) {
            mass += row[j];
            grad += (row[j + 1] - row[j]) * (row[j + 1] - row[j]);
        }
        grad += (row[1] - row[0]) * (row[1] - row[0]);
        mass = row[0] + 2.0 * mass;
        grad *= 2.0;
        double cons = std::abs(mass - 1.0);
        rep.max_conservation_error = std::max(rep.max_conservation_error, cons);
        tally.add("sum g_j = 1", cons - 1e-12);

        rep.fitted_C_g = std::max(rep.fitted_C_g, g0 * s);
        rep.fitted_c = std::min(rep.fitted_c, g0 * s);
        rep.fitted_C_grad = std::max(rep.fitted_C_grad, grad * s3);
    }
    if (!std::isfinite(rep.fitted_c)) rep.fitted_c = 0.0;
    rep.fitted_C = std::max({rep.fitted_C_g, rep.fitted_C_dot, rep.fitted_C_grad});
    tally.add("c <= C", rep.fitted_c - rep.fitted_C);
    tally.add("c > 0", t_grid.empty() ? -1.0 : -rep.fitted_c);
    rep.max_violation = tally.max_violation;
    rep.violations = tally.count;
    return rep;
}

namespace {

template <class F>
double sup_on_log_grid(F f, double lo_exp, double hi_exp, int n)
{
    double best = f(0.0);
    double best_x = -INFINITY;
    double step = (hi_exp - lo_exp) / n;
    for (int i = 0; i <= n; ++i) {
        double x = lo_exp + step * i;
        double v = f(std::pow(10.0, x));
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    if (!std::isfinite(best_x)) return best;
    // Golden-section refinement in log10(t) around the best sample.
    double a = best_x - step, b = best_x + step;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
        double c = b - r * (b - a), d = a + r * (b - a);
        if (f(std::pow(10.0, c)) > f(std::pow(10.0, d)))
            b = d;
        else
            a = c;
    }
    return std::max(best, f(std::pow(10.0, 0.5 * (a + b))));
}

} // namespace

double sup_scaled_gdot0(const KernelSource& k)
{
    return sup_on_log_grid([&](double t) { return -k.g_dot(0, t) * std::pow(1.0 + t, 1.5); }, -6.0, 6.0, 1200);
}

double sup_scaled_grad_energy(const KernelSource& k)
{
    // sum_j (grad+ g_j(t))^2 = -gdot_0(2t) by Parseval.
    return sup_on_log_grid([&](double t) { return -k.g_dot(0, 2.0 * t) * std::pow(1.0 + t, 1.5); }, -6.0, 5.5, 1150);
}

namespace {

// sup_{s>1} (sqrt(s) - 1) / (sqrt(s) (s-1)^gamma), written cancellation-free.
double sup_f_gamma(double gamma)
{
    double best = 0.0;
    for (int i = 0; i <= 6000; ++i) {
        double e = std::pow(10.0, -15.0 + 30.0 * i / 6000.0);  // s - 1
        double s = 1.0 + e;
        double rs = std::sqrt(s);
        double v = std::pow(e, 1.0 - gamma) / (rs * (rs + 1.0));
        best = std::max(best, v);
    }
    if (gamma >= 1.0) best = std::max(best, 0.5);
    return best;
}

} // namespace

HolderReport verify_holder(const KernelSource& k, const std::vector<double>& t_grid, long j_lo, long j_hi,
                           const std::vector<double>& gammas)
{
    if (j_lo > j_hi) std::swap(j_lo, j_hi);
    auto ts = sorted_unique(t_grid);
    const long jabs = std::max(std::abs(j_lo), std::abs(j_hi));
    std::vector<std::vector<double>> rows;
    rows.reserve(ts.size());
    for (double t : ts) rows.push_back(k.row(t, jabs));
    auto val = [&](std::size_t it, long j) { return rows[it][std::abs(j)]; };

    HolderReport rep;
    ViolationTally tally;
    const double c_dot = sup_scaled_gdot0(k);
    const double c_grad = sup_scaled_grad_energy(k);

    for (double gamma : gammas) {
        double bound = 2.0 * c_dot * sup_f_gamma(gamma);
        double fitted = 0.0;
        for (std::size_t a = 0; a < ts.size(); ++a) {
            for (std::size_t b = a + 1; b < ts.size(); ++b) {
                double dt = ts[b] - ts[a];
                double scale = std::pow(dt, gamma) * std::pow(1.0 + ts[a], -gamma - 0.5);
                for (long j = j_lo; j <= j_hi; ++j) {
                    double q = std::abs(val(b, j) - val(a, j)) / scale;
                    fitted = std::max(fitted, q);
                    ++rep.pairs;
                }
            }
        }
        rep.C_gamma[gamma] = fitted;
        rep.C_gamma_bound[gamma] = bound;
        tally.add("temporal", fitted - bound * (1.0 + 1e-9));
    }

    double fitted = 0.0;
    for (std::size_t it = 0; it < ts.size(); ++it) {
        double scale_t = std::pow(1.0 + ts[it], -0.75);
        for (long j1 = j_lo; j1 <= j_hi; ++j1) {
            for (long j2 = j1 + 1; j2 <= j_hi; ++j2) {
                double q = std::abs(val(it, j2) - val(it, j1)) / (std::sqrt(double(j2 - j1)) * scale_t);
                fitted = std::max(fitted, q);
                ++rep.pairs;
            }
        }
    }
    rep.C_spatial = fitted;
    rep.C_spatial_bound = std::sqrt(c_grad);
    tally.add("spatial", fitted - rep.C_spatial_bound * (1.0 + 1e-9));

    rep.max_violation = tally.max_violation;
    rep.violations = tally.count;
    return rep;
}

std::vector<double> standard_t_grid(double t_max, int per_decade)
{
    if (!(t_max > 1e-3) || per_decade < 1) throw DomainError("standard_t_grid: need t_max > 1e-3 and per_decade >= 1");
    std::vector<double> ts{0.0};
    const double hi = std::log10(t_max);
    const int n = int(std::ceil((hi + 3.0) * per_decade));
    for (int i = 0; i <= n; ++i) ts.push_back(std::pow(10.0, -3.0 + (hi + 3.0) * i / n));
    return ts;
}

} // namespace fbd::kernel
