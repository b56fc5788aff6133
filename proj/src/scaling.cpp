#include "fbd/scaling.hpp"

#include "fbd/errors.hpp"
#include "fbd/integrator.hpp"
#include "fbd/potential.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>

namespace fbd::scaling {

namespace {

constexpr double kSampleHalfWidth = 12.0;
constexpr int kSamples = 24000;

double sampled_sup(const std::function<double(double)>& f, int order)
{
    // Central differences on both sides of the kink, never straddling it.
    const double h = 1e-4;
    double best = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        double x = -kSampleHalfWidth + (i + 0.5) * (2 * kSampleHalfWidth / kSamples);
        if (std::abs(x) < 2 * h) continue;
        double d = order == 1 ? (f(x + h) - f(x - h)) / (2 * h) : (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
        best = std::max(best, std::abs(d));
    }
    return best;
}

// Neumann image response of a lattice kernel row placed at window index kl:
// y_j = sum_n w(j - kl + 2Mn) + w(j + kl + 1 + 2Mn).
Vec image_response(const Vec& row, long M, long kl)
{
    const long P = 2 * M;
    const long R = long(row.size()) - 1;
    Vec W(P, 0.0);
    for (long n = -R; n <= R; ++n) W[((n % P) + P) % P] += row[std::abs(n)];
    Vec y(M);
    for (long j = 0; j < M; ++j) y[j] = W[((j - kl) % P + P) % P] + W[((j + kl + 1) % P + P) % P];
    return y;
}

// -2 sum_k H_eps(tau - tau*_k, . - eps k) on the window, in microscopic time.
Vec r1_field(const std::vector<si::TransitionEvent>& events, long first, long M, double t, double eps, double d_star,
             const kernel::KernelSource& kern)
{
    Vec r(M, 0.0);
    const double T = d_star / eps;  // d_* eps in tau
    for (const auto& e : events) {
        double s = t - e.t_star;
        if (!(s > 0.0)) continue;
        double scale = 1.0, ts = s;
        if (s < T) {
            scale = s / T;
            ts = T;
        }
        auto row = kern.row(ts, kernel::truncation_radius(ts));
        Vec y = image_response(row, M, e.k - first);
        for (long j = 0; j < M; ++j) r[j] -= 2.0 * scale * y[j];
    }
    return r;
}

double l1(const Vec& v, double eps)
{
    double acc = 0.0;
    for (double x : v) acc += std::abs(x);
    return acc * eps;
}

double grad_l2(const Vec& v, double eps)
{
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        double g = (v[j + 1] - v[j]) / eps;
        acc += g * g;
    }
    return std::sqrt(acc * eps);
}

} // namespace

double ProfileSpec::value(double xi) const
{
    switch (kind) {
    case Kind::exp_kink:
        return xi < 0.0 ? 1.0 + a * (1.0 - std::exp(xi / ell)) : 1.0 - b * (1.0 - std::exp(-xi / ell));
    case Kind::standing:
        return xi <= 0.0 ? 1.0 - offset : 1.0 - offset - b * (1.0 - std::exp(-xi / ell));
    case Kind::custom:
        if (!custom) throw ConfigError("custom profile without a function");
        return custom(xi);
    }
    return NAN;
}

double ProfileSpec::slope_bound() const
{
    switch (kind) {
    case Kind::exp_kink: return std::max(a, b) / ell;
    case Kind::standing: return b / ell;
    case Kind::custom: return sampled_sup([this](double x) { return value(x); }, 1);
    }
    return NAN;
}

double ProfileSpec::curvature_bound() const
{
    switch (kind) {
    case Kind::exp_kink: return std::max(a, b) / (ell * ell);
    case Kind::standing: return b / (ell * ell);
    case Kind::custom: return sampled_sup([this](double x) { return value(x); }, 2);
    }
    return NAN;
}

double ProfileSpec::kink() const
{
    switch (kind) {
    case Kind::exp_kink: return (b - a) / ell;
    case Kind::standing: return b / ell;
    case Kind::custom: {
        const double h = 1e-6;
        double l = (value(0.0) - value(-h)) / h, r = (value(h) - value(0.0)) / h;
        return l - r;
    }
    }
    return NAN;
}

void ProfileSpec::validate() const
{
    if (kind != Kind::custom && !(ell > 0.0 && a > 0.0 && b > 0.0 && b < 2.0))
        throw DataError("profile: need l > 0, a > 0 and 0 < b < 2");
    if (kind == Kind::standing && !(offset > 0.0 && offset + b < 2.0))
        throw DataError("standing profile: need 0 < s and s + b < 2");
    const double p0 = value(0.0);
    const double h = 1e-9;
    if (std::abs(value(-h) - p0) > 1e-6 || std::abs(value(h) - p0) > 1e-6) throw DataError("profile is not continuous at 0");
    if (kind != Kind::standing && std::abs(p0 - 1.0) > 1e-12) throw DataError("profile must equal 1 at the interface");
    for (int i = 1; i <= kSamples; ++i) {
        double x = kSampleHalfWidth * double(i) / kSamples;
        double l = value(-x), r = value(x);
        if (!std::isfinite(l) || !std::isfinite(r)) throw DataError("profile is not finite");
        if (kind == Kind::standing ? !(l > -1.0 && l <= 1.0) : !(l > 1.0)) {
            std::ostringstream os;
            os << "profile violates the left phase condition at xi=" << -x << " (P=" << l << ")";
            throw DataError(os.str());
        }
        if (!(r > -1.0 && r < 1.0)) {
            std::ostringstream os;
            os << "profile leaves (-1, 1) right of the interface at xi=" << x << " (P=" << r << ")";
            throw DataError(os.str());
        }
    }
}

ProfileSpec ProfileSpec::reference()
{
    return {};
}

ProfileSpec ProfileSpec::sweep()
{
    ProfileSpec p;
    p.a = 2.25;
    p.ell = 1.0;
    return p;
}

ProfileSpec ProfileSpec::standing_default()
{
    ProfileSpec p;
    p.kind = Kind::standing;
    return p;
}

std::string to_string(ProfileSpec::Kind k)
{
    switch (k) {
    case ProfileSpec::Kind::exp_kink: return "exp-kink";
    case ProfileSpec::Kind::standing: return "standing";
    case ProfileSpec::Kind::custom: return "custom";
    }
    return "?";
}

ProfileSpec::Kind profile_kind_from_string(const std::string& s)
{
    if (s == "exp-kink") return ProfileSpec::Kind::exp_kink;
    if (s == "standing") return ProfileSpec::Kind::standing;
    if (s == "custom") return ProfileSpec::Kind::custom;
    throw ConfigError("unknown profile kind '" + s + "'");
}

ScaledData build_initial_data(const ProfileSpec& profile, double eps, double tau_end)
{
    if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("build_initial_data: eps must lie in (0, 1]");
    if (!(tau_end >= 0.0)) throw DomainError("build_initial_data: tau_end must be non-negative");
    profile.validate();

    const double t_end = tau_end / (eps * eps);
    const double spread = std::ceil(11.0 * std::sqrt(t_end)) + 50.0;
    const double travel = std::ceil(profile.slope_bound() * tau_end / eps) + 10.0;
    const long reach = long(std::ceil(1.0 / eps));
    long left = std::max(long(spread), reach);
    long right = std::max(long(travel + spread), reach);
    // The Neumann ghosts act like a kink at the window edges; widen until the
    // profile is flat enough there to keep |Delta p| <= alpha eps^2.
    const double alpha_profile = profile.slope_bound() + profile.curvature_bound();
    auto edge_ok = [&](long j, long dir) {
        double g = std::abs(profile.value(eps * double(j)) - profile.value(eps * double(j - dir)));
        return g <= 0.5 * alpha_profile * eps * eps;
    };
    while (!edge_ok(-left, -1)) {
        left += left / 4 + 1;
        if (left > 50'000'000) throw DataError("build_initial_data: profile does not flatten on the left");
    }
    while (!edge_ok(right, 1)) {
        right += right / 4 + 1;
        if (right > 50'000'000) throw DataError("build_initial_data: profile does not flatten on the right");
    }

    ScaledData d;
    d.eps = eps;
    d.alpha_profile = alpha_profile;
    d.beta_profile = std::abs(profile.kink());

    double pmax_right = -INFINITY;
    for (long j = 1; j <= right; ++j) pmax_right = std::max(pmax_right, profile.value(eps * double(j)));
    const double margin = 1.0 - pmax_right;
    if (!(margin > 0.0)) throw MarginError("build_initial_data: profile reaches 1 right of the interface");
    d.c_eps = std::min(eps, 0.5 * margin);
    if (profile.kind == ProfileSpec::Kind::standing) d.c_eps = std::min(d.c_eps, profile.offset);
    if (!(d.c_eps > 0.0)) throw MarginError("build_initial_data: no positive offset c_eps");

    d.state.t = 0.0;
    d.state.first_index = -left;
    d.state.bc = BoundaryCondition::neumann();
    d.state.u.resize(std::size_t(left + right + 1));
    d.p0.resize(d.state.u.size());
    for (long j = -left; j <= right; ++j) {
        double p = profile.value(eps * double(j)) + d.c_eps;
        d.p0[std::size_t(j + left)] = p;
        d.state.u[std::size_t(j + left)] = p + (j <= 0 ? 1.0 : -1.0);
    }
    d.state.validate();

    const auto& p = d.p0;
    const Vec lap = discrete_laplacian(p, d.state.bc);
    double grad = 0.0, curv = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) grad = std::max(grad, std::abs(p[i + 1] - p[i]));
    for (std::size_t i = 0; i < p.size(); ++i)
        if (long(i) != left) curv = std::max(curv, std::abs(lap[i]));
    d.alpha = std::max(grad / eps, curv / (eps * eps));
    d.beta = std::abs(lap[std::size_t(left)]) / eps;

    // The data inherit the profile constants up to O(eps).
    if (d.alpha > d.alpha_profile * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "build_initial_data: alpha from data " << d.alpha << " exceeds the profile bound " << d.alpha_profile;
        throw DataError(os.str());
    }
    if (std::abs(d.beta - d.beta_profile) > d.alpha_profile * eps + 1e-12) {
        std::ostringstream os;
        os << "build_initial_data: beta from data " << d.beta << " differs from the kink " << d.beta_profile;
        throw DataError(os.str());
    }
    return d;
}

ScaledRun run_scaled(const ProfileSpec& profile, double eps, double tau_end, int n_snap, const si::SolverOptions& opts)
{
    if (n_snap < 1) throw ConfigError("run_scaled: n_snap must be >= 1");
    ScaledRun r;
    r.eps = eps;
    r.tau_end = tau_end;
    r.data = build_initial_data(profile, eps, tau_end);
    std::vector<double> times;
    for (int n = 0; n <= n_snap; ++n) {
        double tau = tau_end * double(n) / double(n_snap);
        r.taus.push_back(tau);
        times.push_back(tau / (eps * eps));
    }
    r.run = si::run_single_interface(r.data.state, tau_end / (eps * eps), times, opts);
    return r;
}

Vec event_taus(const ScaledRun& r)
{
    Vec out;
    for (const auto& e : r.run.log.events) {
        double tau = e.t_star * r.eps * r.eps;
        if (tau < r.tau_end) out.push_back(tau);
    }
    return out;
}

RegularBoundsReport regular_part_bounds(const ScaledRun& r, const kernel::KernelSource& kern, double tol)
{
    RegularBoundsReport rep;
    rep.max_grad_slack = -INFINITY;
    rep.max_qdot_slack = -INFINITY;
    const double eps = r.eps;
    const auto& d = r.data;
    for (const auto& snap : r.run.snapshots) {
        double t = snap.t - r.run.t0;
        Vec q = si::regular_part(d.p0, t, kern);
        Vec qdot = discrete_laplacian(q, d.state.bc);
        const double gb = d.alpha * eps, qb = d.alpha * eps * eps + d.beta * eps * kern.g(0, t);
        bool bad = false;
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (i + 1 < q.size()) {
                double s = std::abs(q[i + 1] - q[i]) - gb;
                rep.max_grad_slack = std::max(rep.max_grad_slack, s);
                bad = bad || s > tol;
            }
            double s = std::abs(qdot[i]) - qb;
            rep.max_qdot_slack = std::max(rep.max_qdot_slack, s);
            bad = bad || s > tol;
        }
        ++rep.checkpoints;
        if (bad) ++rep.violations;
    }
    return rep;
}

GapReport gap_statistics(const std::vector<ScaledRun>& runs)
{
    GapReport rep;
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : runs) {
        GapEntry e;
        e.eps = r.eps;
        Vec taus = event_taus(r);
        e.K = long(taus.size());
        e.K_eps = double(e.K) * r.eps;
        const auto& ev = r.run.log.events;
        // The gap after the last event below tau_end counts when the run saw the next one.
        for (std::size_t k = 0; k + 1 < ev.size() && long(k) < e.K; ++k)
            e.min_scaled_gap = std::min(e.min_scaled_gap, r.eps * (ev[k + 1].t_star - ev[k].t_star));
        if (std::isfinite(e.min_scaled_gap)) {
            lo = std::min(lo, e.min_scaled_gap);
            hi = std::max(hi, e.min_scaled_gap);
        }
        rep.max_K_eps = std::max(rep.max_K_eps, e.K_eps);
        rep.entries.push_back(e);
    }
    if (std::isfinite(lo)) {
        rep.d_star = 0.5 * lo;
        rep.variation = hi / lo;
        for (std::size_t i = 0; i < runs.size(); ++i)
            if (double(rep.entries[i].K) > runs[i].tau_end / (2.0 * rep.d_star * runs[i].eps) + 1e-9)
                rep.K_bound_ok = false;
    }
    return rep;
}

double Embedding::xi_star(double tau) const
{
    double x = eps * double(k_initial - 1);
    for (std::size_t n = 0; n < event_tau.size(); ++n)
        if (event_tau[n] <= tau) x = eps * double(event_k[n]);
    return x;
}

Embedding build_embeddings(const ScaledRun& r, const kernel::KernelSource& kern)
{
    Embedding emb;
    emb.eps = r.eps;
    emb.first_index = r.data.state.first_index;
    emb.k_initial = si::interface_index(r.data.state.u, emb.first_index);
    for (const auto& e : r.run.log.events) {
        emb.event_tau.push_back(e.t_star * r.eps * r.eps);
        emb.event_k.push_back(e.k);
    }
    auto dec = si::decompose(r.run, r.data.p0, kern);
    emb.max_decomposition_residual = dec.max_residual;
    for (std::size_t n = 0; n < r.run.snapshots.size(); ++n) {
        emb.tau.push_back(r.run.snapshots[n].t * r.eps * r.eps);
        emb.P.push_back(si::p_from_u(r.run.snapshots[n].u));
        emb.Q.push_back(std::move(dec.q[n]));
        emb.R.push_back(std::move(dec.r[n]));
    }
    return emb;
}

SplitFields split_R(const ScaledRun& r, const Embedding& emb, double d_star, const kernel::KernelSource& kern,
                    int nodes_per_event)
{
    if (!(d_star > 0.0)) throw DomainError("split_R: d_star must be positive");
    if (nodes_per_event < 1) throw ConfigError("split_R: need at least one node per event");
    const double eps = r.eps;
    const double eps2 = eps * eps;
    const long M = long(r.data.p0.size());
    const long first = emb.first_index;
    const auto& events = r.run.log.events;
    for (std::size_t k = 0; k + 1 < events.size(); ++k) {
        if ((events[k + 1].t_star - events[k].t_star) * eps2 < d_star * eps) {
            std::ostringstream os;
            os << "split_R: d_star=" << d_star << " too large, regularization intervals of events " << events[k].k
               << " and " << events[k + 1].k << " overlap";
            throw MarginError(os.str());
        }
    }

    SplitFields sf;
    sf.d_star = d_star;
    const double T = d_star / eps;  // interval length in t
    auto inside_interval = [&](double t) {
        for (const auto& e : events)
            if (t >= e.t_star && t <= e.t_star + T) return true;
        return false;
    };

    for (std::size_t n = 0; n < emb.tau.size(); ++n) {
        double t = emb.tau[n] / eps2;
        Vec r1 = r1_field(events, first, M, t, eps, d_star, kern);
        Vec r2(M);
        for (long j = 0; j < M; ++j) r2[j] = emb.R[n][j] - r1[j];
        double sup = 0.0;
        for (double x : r2) sup = std::max(sup, std::abs(x));
        sf.sup_R2 = std::max(sf.sup_R2, sup);
        if (!inside_interval(t)) sf.R2_outside = std::max(sf.R2_outside, sup);
        sf.R1_L1_sup = std::max(sf.R1_L1_sup, l1(r1, eps));
        sf.gradR1_L2_sup = std::max(sf.gradR1_L2_sup, grad_l2(r1, eps));
        sf.R1.push_back(std::move(r1));
        sf.R2.push_back(std::move(r2));
    }

    // int_0^tau_end int |R2| dxi dtau = eps^3 int dt sum_j |R2_j(t)|; nodes
    // s = L x^2 resolve the fast start of each heat kernel.
    const double t_end = r.tau_end / eps2;
    for (const auto& e : events) {
        if (!(e.t_star < t_end)) break;
        const double L = std::min(T, t_end - e.t_star);
        double acc = 0.0;
        for (int i = 0; i < nodes_per_event; ++i) {
            double x = (i + 0.5) / nodes_per_event;
            double s = L * x * x, w = L * 2.0 * x / nodes_per_event;
            double t = e.t_star + s;
            Vec R = si::singular_part(r.run.log, first, std::size_t(M), t, kern);
            Vec r1 = r1_field(events, first, M, t, eps, d_star, kern);
            double row = 0.0;
            for (long j = 0; j < M; ++j) {
                double v = std::abs(R[j] - r1[j]);
                row += v;
                sf.sup_R2 = std::max(sf.sup_R2, v);
            }
            acc += w * row;
        }
        sf.R2_L1 += acc * eps2 * eps;
    }

    for (const auto& e : events) {
        if (!(e.t_star < t_end)) break;
        Vec q = si::regular_part(r.data.p0, e.t_star, kern);
        Vec r1 = r1_field(events, first, M, e.t_star, eps, d_star, kern);
        long j = e.k - first;
        sf.interface_condition = std::max(sf.interface_condition, std::abs(q[j] + r1[j] - 1.0));
    }
    return sf;
}

HolderReport holder_diagnostics(const Embedding& emb, const SplitFields& split)
{
    HolderReport h;
    const std::size_t nt = emb.tau.size();
    const std::size_t M = nt ? emb.Q[0].size() : 0;
    const double gammas[] = {0.25, 0.4, 0.49};
    double r1_time[3] = {0.0, 0.0, 0.0};
    for (std::size_t n1 = 0; n1 < nt; ++n1) {
        for (std::size_t step = 1; n1 + step < nt; step *= 2) {
            std::size_t n2 = n1 + step;
            double dt = emb.tau[n2] - emb.tau[n1];
            if (!(dt > 0.0)) continue;
            double dq = 0.0, dr = 0.0;
            for (std::size_t j = 0; j < M; ++j) {
                dq = std::max(dq, std::abs(emb.Q[n2][j] - emb.Q[n1][j]));
                dr = std::max(dr, std::abs(split.R1[n2][j] - split.R1[n1][j]));
            }
            h.Q_time = std::max(h.Q_time, dq / std::sqrt(dt));
            for (int g = 0; g < 3; ++g) r1_time[g] = std::max(r1_time[g], dr / std::pow(dt, gammas[g]));
        }
        for (std::size_t off = 1; off < M; off *= 2) {
            double dx = emb.eps * double(off);
            for (std::size_t j = 0; j + off < M; ++j) {
                h.Q_space = std::max(h.Q_space, std::abs(emb.Q[n1][j + off] - emb.Q[n1][j]) / dx);
                h.R1_space = std::max(h.R1_space, std::abs(split.R1[n1][j + off] - split.R1[n1][j]) / std::sqrt(dx));
            }
        }
    }
    for (int g = 0; g < 3; ++g) h.R1_time.emplace_back(gammas[g], r1_time[g]);
    for (std::size_t k = 0; k + 1 < emb.event_tau.size(); ++k) {
        double dt = emb.event_tau[k + 1] - emb.event_tau[k];
        if (dt > 0.0) h.xi_lipschitz = std::max(h.xi_lipschitz, emb.eps / dt);
    }
    h.R1_L1_sup = split.R1_L1_sup;
    h.gradR1_L2_sup = split.gradR1_L2_sup;
    return h;
}

namespace {

double macro_P(const macro::MacroSolution& sol, double tau, double xi)
{
    const auto& tg = sol.tau_grid;
    if (tau <= tg.front()) return macro::P_at(sol, 0, xi);
    if (tau >= tg.back()) return macro::P_at(sol, tg.size() - 1, xi);
    std::size_t n = std::size_t(std::upper_bound(tg.begin(), tg.end(), tau) - tg.begin());
    double w = (tau - tg[n - 1]) / (tg[n] - tg[n - 1]);
    return (1.0 - w) * macro::P_at(sol, n - 1, xi) + w * macro::P_at(sol, n, xi);
}

} // namespace

LimitComparison compare_to_limit(const std::vector<Embedding>& embs, const std::vector<SplitFields>& splits,
                                 const macro::MacroSolution& limit)
{
    if (embs.size() != splits.size()) throw ConfigError("compare_to_limit: embeddings and splits differ in number");
    LimitComparison c;
    const double tau_max = limit.tau_grid.back();
    const double xi_lo = limit.xi_grid.front(), xi_hi = limit.xi_grid.back();
    for (std::size_t m = 0; m < embs.size(); ++m) {
        const auto& e = embs[m];
        const auto& s = splits[m];
        double xe = 0.0;
        auto probe = [&](double tau) {
            if (tau < 0.0 || tau > tau_max) return;
            xe = std::max(xe, std::abs(e.xi_star(tau) - macro::xi_star_at(limit, tau)));
        };
        for (double tau : limit.tau_grid) probe(tau);
        for (double tau : e.event_tau) {
            probe(tau);
            probe(std::nextafter(tau, 0.0));
        }
        double pe = 0.0, minp = INFINITY, maxr = -INFINITY;
        for (std::size_t n = 0; n < e.tau.size(); ++n) {
            if (e.tau[n] > tau_max + 1e-12) continue;
            double xs = e.xi_star(e.tau[n]);
            for (std::size_t j = 0; j < e.P[n].size(); ++j) {
                double xi = e.xi(j);
                minp = std::min(minp, e.P[n][j]);
                if (xi > xs) maxr = std::max(maxr, e.P[n][j]);
                if (xi < xi_lo || xi > xi_hi) continue;
                pe = std::max(pe, std::abs(e.Q[n][j] + s.R1[n][j] - macro_P(limit, e.tau[n], xi)));
            }
        }
        c.eps.push_back(e.eps);
        c.xi_error.push_back(xe);
        c.P_error.push_back(pe);
        c.min_P.push_back(minp);
        c.max_P_right.push_back(maxr);
    }
    // Order by decreasing eps and require errors to shrink within 10 %.
    std::vector<std::size_t> idx(c.eps.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return c.eps[a] > c.eps[b]; });
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (c.xi_error[idx[i]] > 1.1 * c.xi_error[idx[i - 1]]) c.monotone = false;
        if (c.P_error[idx[i]] > 1.1 * c.P_error[idx[i - 1]]) c.monotone = false;
    }
    return c;
}

macro::MacroSolution solve_limit(const ProfileSpec& profile, double tau_end, double dxi, double xi_half, int n_out)
{
    macro::GridParams g;
    g.xi_min = -xi_half;
    g.xi_max = xi_half;
    g.dxi = dxi;
    g.tau_end = tau_end;
    g.n_out = n_out;
    return macro::solve_fbp([&](double x) { return profile.value(x); }, 0.0, g);
}

CrossCheck euler_cross_check(const ProfileSpec& profile, double eps, double t_end, double dt)
{
    auto data = build_initial_data(profile, eps, eps * eps * t_end);
    auto si_run = si::run_single_interface(data.state, t_end, {t_end});
    if (si_run.snapshots.empty()) throw InconsistencyError("euler_cross_check: no event-solver snapshot at t_end");

    EulerConfig cfg;
    cfg.dt0 = dt;
    cfg.t_end = t_end;
    cfg.energy_guard = false;
    cfg.energy_stride = 1u << 30;
    cfg.snapshot_times = {eps * eps * t_end};
    auto traj = run(data.state, Potential::piecewise_quadratic(), cfg, eps);

    CrossCheck c;
    c.t = t_end;
    c.events = si_run.log.events.size();
    c.euler_steps = traj.accepted;
    const auto& a = si_run.snapshots.back().u;
    const auto& b = traj.snapshots.back().u;
    for (std::size_t i = 0; i < a.size(); ++i) c.sup_distance = std::max(c.sup_distance, std::abs(a[i] - b[i]));
    return c;
}

double loglog_slope(const Vec& x, const Vec& y)
{
    if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("loglog_slope: non-positive value");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

double spread(const Vec& v)
{
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0.0 ? *hi / *lo : INFINITY;
}

} // namespace

SweepResult run_sweep(const ProfileSpec& profile, const Vec& eps_list, double tau_end,
                      const kernel::KernelSource& kern, int n_snap)
{
    if (eps_list.empty()) throw ConfigError("run_sweep: empty eps list");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = eps_list.size();
    SweepResult sw;
    sw.profile = profile;
    sw.tau_end = tau_end;
    sw.runs.resize(n);
    sw.embeddings.resize(n);
    sw.bounds.resize(n);

    std::vector<std::future<void>> jobs;
    for (std::size_t i = 0; i < n; ++i)
        jobs.push_back(std::async(std::launch::async, [&, i] {
            sw.runs[i] = run_scaled(profile, eps_list[i], tau_end, n_snap);
            sw.embeddings[i] = build_embeddings(sw.runs[i], kern);
            sw.bounds[i] = regular_part_bounds(sw.runs[i], kern);
        }));
    for (auto& j : jobs) j.get();
    jobs.clear();

    sw.gaps = gap_statistics(sw.runs);
    if (sw.gaps.d_star > 0.0) {
        sw.d_split = 0.9 * sw.gaps.d_star;
        sw.splits.resize(n);
        sw.holder.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            jobs.push_back(std::async(std::launch::async, [&, i] {
                sw.splits[i] = split_R(sw.runs[i], sw.embeddings[i], sw.d_split, kern);
                sw.holder[i] = holder_diagnostics(sw.embeddings[i], sw.splits[i]);
            }));
        for (auto& j : jobs) j.get();

        Vec l1, r1, g1;
        for (const auto& s : sw.splits) {
            l1.push_back(s.R2_L1);
            r1.push_back(s.R1_L1_sup);
            g1.push_back(s.gradR1_L2_sup);
        }
        if (n >= 2) sw.R2_L1_slope = loglog_slope(eps_list, l1);
        sw.R1_L1_ratio = spread(r1);
        sw.gradR1_L2_ratio = spread(g1);
    }
    sw.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sw;
}

} // namespace fbd::scaling
