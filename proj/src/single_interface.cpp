#include "fbd/single_interface.hpp"

#include "fbd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fbd::si {

namespace {

std::string site_msg(const char* what, long j, double v, double t)
{
    std::ostringstream os;
    os.precision(17);
    os << what << " at site " << j << " (u=" << v << ", t=" << t << ")";
    return os.str();
}

// Full-state phase check. zero_site may hold exactly 0 (the site that just
// crossed); it is skipped.
void verify_phase_state(const Vec& u, long first, long k, double D, double t, long zero_site)
{
    for (std::size_t i = 0; i < u.size(); ++i) {
        long j = first + long(i);
        if (j == zero_site) continue;
        double v = u[i];
        if (j < k && !(v > 0.0)) throw SequentialityViolation(site_msg("left phase lost positivity", j, v, t));
        if (j >= k && !(v < 0.0)) throw SequentialityViolation(site_msg("right phase site reached 0", j, v, t));
        if (j >= k && !(v > -2.0)) throw PhaseConsistencyError(site_msg("value left (-2, 0)", j, v, t));
        if (v > D * (1.0 + 1e-12) + 1e-12) throw InconsistencyError(site_msg("comparison bound D exceeded", j, v, t));
    }
}

} // namespace

bool check_membership(const Vec& u, long first_index, long k)
{
    for (std::size_t i = 0; i < u.size(); ++i) {
        long j = first_index + long(i);
        double v = u[i];
        if (j < k) {
            if (!(v > 0.0)) return false;
        } else if (!(v < 0.0 && v > -2.0)) {
            return false;
        }
    }
    return true;
}

long interface_index(const Vec& u, long first_index)
{
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] < 0.0) return first_index + long(i);
    return first_index + long(u.size());
}

Vec source_vector(std::size_t size, long first_index, long k)
{
    Vec b(size, 0.0);
    long kl = k - first_index;
    // Both k-1 and k must be inside: at the edge the ghost shares the sign.
    if (kl >= 1 && kl < long(size)) {
        b[kl - 1] = 2.0;
        b[kl] = -2.0;
    }
    return b;
}

Vec linear_rhs(const Vec& u, long first_index, long k)
{
    if (!check_membership(u, first_index, k))
        throw PhaseConsistencyError("linear_rhs: state is not in X_" + std::to_string(k));
    Vec out = discrete_laplacian(u, BoundaryCondition::neumann());
    Vec b = source_vector(u.size(), first_index, k);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += b[i];
    return out;
}

NeumannModes::NeumannModes(std::size_t M) : M_(M), lambda_(M), cos_table_(4 * M)
{
    if (M == 0) throw InvalidStateError("NeumannModes: empty window");
    for (std::size_t m = 0; m < M; ++m) {
        double s = std::sin(std::numbers::pi * double(m) / (2.0 * double(M)));
        lambda_[m] = -4.0 * s * s;
    }
    for (std::size_t r = 0; r < 4 * M; ++r) cos_table_[r] = std::cos(2.0 * std::numbers::pi * double(r) / double(4 * M));
}

double NeumannModes::basis(std::size_t m, std::size_t i) const
{
    return cos_table_[(m * (2 * i + 1)) % (4 * M_)];
}

Vec NeumannModes::project(const Vec& v) const
{
    if (v.size() != M_) throw InvalidStateError("NeumannModes::project: size mismatch");
    const std::size_t P = 4 * M_;
    Vec c(M_, 0.0);
    for (std::size_t m = 0; m < M_; ++m) {
        std::size_t idx = m % P, step = (2 * m) % P;
        double acc = 0.0;
        for (std::size_t i = 0; i < M_; ++i) {
            acc += v[i] * cos_table_[idx];
            idx += step;
            if (idx >= P) idx -= P;
        }
        c[m] = acc / (m == 0 ? double(M_) : 0.5 * double(M_));
    }
    return c;
}

Vec NeumannModes::synthesize(const Vec& c) const
{
    if (c.size() != M_) throw InvalidStateError("NeumannModes::synthesize: size mismatch");
    const std::size_t P = 4 * M_;
    Vec v(M_, 0.0);
    for (std::size_t m = 0; m < M_; ++m) {
        if (c[m] == 0.0) continue;
        std::size_t idx = m % P, step = (2 * m) % P;
        for (std::size_t i = 0; i < M_; ++i) {
            v[i] += c[m] * cos_table_[idx];
            idx += step;
            if (idx >= P) idx -= P;
        }
    }
    return v;
}

LinearFlow::LinearFlow(std::shared_ptr<const NeumannModes> modes, const Vec& u0, const Vec& b)
    : modes_(std::move(modes))
{
    const std::size_t M = modes_->size();
    if (u0.size() != M || b.size() != M) throw InvalidStateError("LinearFlow: size mismatch");
    Vec c = modes_->project(u0);
    Vec cb = modes_->project(b);
    if (std::abs(cb[0]) > 1e-12) throw CompatibilityError("LinearFlow: source has nonzero mass");
    Vec steady(M, 0.0);
    amp_.assign(M, 0.0);
    steady[0] = c[0];
    for (std::size_t m = 1; m < M; ++m) {
        steady[m] = -cb[m] / modes_->lambda(m);
        amp_[m] = c[m] - steady[m];
    }
    u_inf_ = modes_->synthesize(steady);
}

LinearFlow::Component LinearFlow::component(std::size_t i) const
{
    Component c;
    c.base = u_inf_.at(i);
    const std::size_t M = modes_->size();
    for (std::size_t m = 1; m < M; ++m) {
        double a = amp_[m] * modes_->basis(m, i);
        if (a == 0.0) continue;
        c.coef.push_back(a);
        c.lam.push_back(modes_->lambda(m));
    }
    return c;
}

double LinearFlow::Component::value(double s) const
{
    double v = base;
    for (std::size_t m = 0; m < coef.size(); ++m) {
        double x = lam[m] * s;
        if (x > -745.0) v += coef[m] * std::exp(x);
    }
    return v;
}

double LinearFlow::Component::derivative(double s) const
{
    double v = 0.0;
    for (std::size_t m = 0; m < coef.size(); ++m) {
        double x = lam[m] * s;
        if (x > -745.0) v += coef[m] * lam[m] * std::exp(x);
    }
    return v;
}

double LinearFlow::Component::curvature_bound(double s) const
{
    double v = 0.0;
    for (std::size_t m = 0; m < coef.size(); ++m) {
        double x = lam[m] * s;
        if (x > -745.0) v += std::abs(coef[m]) * lam[m] * lam[m] * std::exp(x);
    }
    return v;
}

double LinearFlow::value(std::size_t i, double s) const { return component(i).value(s); }

double LinearFlow::derivative(std::size_t i, double s) const { return component(i).derivative(s); }

Vec LinearFlow::state(double s) const
{
    const std::size_t M = modes_->size();
    Vec c(M, 0.0);
    for (std::size_t m = 1; m < M; ++m) {
        double x = modes_->lambda(m) * s;
        if (x > -745.0) c[m] = amp_[m] * std::exp(x);
        if (std::abs(c[m]) < 1e-18) c[m] = 0.0;  // below rounding of O(1) states; synthesize skips it
    }
    Vec v = modes_->synthesize(c);
    for (std::size_t i = 0; i < M; ++i) v[i] += u_inf_[i];
    return v;
}

Vec apply_neumann_images(const Vec& row, const Vec& x)
{
    const long M = long(x.size());
    if (M == 0) return {};
    const long P = 2 * M;
    const long R = long(row.size()) - 1;
    Vec y(M, 0.0);
    if (2 * R + 1 < P) {
        // Even reflection X of period 2M turns both image sums into one
        // periodic convolution: y_j = sum_n w_n X_{j-n}.
        for (long j = 0; j < M; ++j) {
            double acc = 0.0;
            for (long n = -R; n <= R; ++n) {
                long d = ((j - n) % P + P) % P;
                acc += row[std::abs(n)] * x[d < M ? d : P - 1 - d];
            }
            y[j] = acc;
        }
        return y;
    }
    // Periodic fold W(d) = sum_n w(d + nP), d in [0, P).
    Vec W(P, 0.0);
    for (long n = -R; n <= R; ++n) {
        long d = ((n % P) + P) % P;
        W[d] += row[std::abs(n)];
    }
    for (long j = 0; j < M; ++j) {
        double acc = 0.0;
        for (long i = 0; i < M; ++i) {
            if (x[i] == 0.0) continue;
            long a = ((j - i) % P + P) % P;
            long b = (j + i + 1) % P;
            acc += (W[a] + W[b]) * x[i];
        }
        y[j] = acc;
    }
    return y;
}

namespace {

DenseOutput run_stepping(const Vec& u0, const Vec& b, const std::vector<double>& t_span, double step)
{
    auto f = [&](const Vec& u) {
        Vec d = discrete_laplacian(u, BoundaryCondition::neumann());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += b[i];
        return d;
    };
    auto rk4 = [&](Vec u, double h) {
        const std::size_t n = u.size();
        Vec k1 = f(u), tmp(n);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
        Vec k2 = f(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
        Vec k3 = f(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
        Vec k4 = f(tmp);
        for (std::size_t i = 0; i < n; ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return u;
    };
    DenseOutput out;
    out.method = InterEventMethod::stepping;
    Vec coarse = u0, fine = u0;
    double t = 0.0;
    for (double target : t_span) {
        double span = target - t;
        long n = std::max<long>(1, long(std::ceil(span / step)));
        double h = span / double(n);
        if (span > 0.0) {
            for (long s = 0; s < n; ++s) coarse = rk4(coarse, h);
            for (long s = 0; s < 2 * n; ++s) fine = rk4(fine, 0.5 * h);
        }
        t = target;
        Vec extrap(u0.size());
        double err = 0.0;
        for (std::size_t i = 0; i < extrap.size(); ++i) {
            extrap[i] = (16.0 * fine[i] - coarse[i]) / 15.0;
            err = std::max(err, std::abs(fine[i] - coarse[i]) / 15.0);
        }
        out.error_estimate = std::max(out.error_estimate, err);
        out.times.push_back(target);
        out.states.push_back(std::move(extrap));
    }
    return out;
}

} // namespace

DenseOutput inter_event_integrator(const Vec& u0, long first_index, long k, const std::vector<double>& t_span,
                                   InterEventMethod method, const kernel::KernelEvaluator& kern, double step)
{
    if (u0.empty()) throw InvalidStateError("inter_event_integrator: empty state");
    if (!(step > 0.0 && step <= 0.25)) throw ConfigError("inter_event_integrator: stepping needs 0 < dt <= 0.25");
    std::vector<double> times = t_span;
    std::sort(times.begin(), times.end());
    if (!times.empty() && times.front() < 0.0) throw DomainError("inter_event_integrator: negative time");
    Vec b = source_vector(u0.size(), first_index, k);

    switch (method) {
    case InterEventMethod::spectral: {
        auto modes = std::make_shared<NeumannModes>(u0.size());
        LinearFlow flow(modes, u0, b);
        DenseOutput out;
        out.method = method;
        for (double t : times) {
            out.times.push_back(t);
            out.states.push_back(flow.state(t));
        }
        return out;
    }
    case InterEventMethod::duhamel: {
        DenseOutput out;
        out.method = method;
        for (double t : times) {
            long R = kernel::truncation_radius(t);
            Vec u = apply_neumann_images(kern.row(t, R), u0);
            Vec src = apply_neumann_images(kern.integral_row(t, R), b);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] += src[i];
            out.times.push_back(t);
            out.states.push_back(std::move(u));
        }
        return out;
    }
    case InterEventMethod::stepping: return run_stepping(u0, b, times, step);
    }
    throw ConfigError("inter_event_integrator: unknown method");
}

double cross_check_methods(const Vec& u0, long first_index, long k, const std::vector<double>& t_span,
                           const kernel::KernelEvaluator& kern, double tol)
{
    auto a = inter_event_integrator(u0, first_index, k, t_span, InterEventMethod::spectral, kern);
    auto b = inter_event_integrator(u0, first_index, k, t_span, InterEventMethod::duhamel, kern);
    auto c = inter_event_integrator(u0, first_index, k, t_span, InterEventMethod::stepping, kern);
    double worst = 0.0;
    for (std::size_t n = 0; n < a.times.size(); ++n) {
        for (std::size_t i = 0; i < u0.size(); ++i) {
            worst = std::max({worst, std::abs(a.states[n][i] - b.states[n][i]), std::abs(a.states[n][i] - c.states[n][i]),
                              std::abs(b.states[n][i] - c.states[n][i])});
        }
    }
    if (worst > tol) {
        std::ostringstream os;
        os << "inter_event_integrator: methods disagree by " << worst << " > " << tol;
        throw InconsistencyError(os.str());
    }
    return worst;
}

SingleInterfaceSolver::SingleInterfaceSolver(std::size_t window_size, SolverOptions opts)
    : modes_(std::make_shared<NeumannModes>(window_size)), opts_(opts)
{
    if (window_size < 3) throw InvalidStateError("single-interface window needs at least 3 sites");
    if (!(opts_.h_min > 0.0 && opts_.h_max >= opts_.h_min)) throw ConfigError("single-interface: bad scan steps");
}

AdvanceResult SingleInterfaceSolver::advance_to_next_transition(const SingleInterfaceState& state, double horizon,
                                                                const std::vector<double>& snapshot_times,
                                                                std::vector<SingleInterfaceState>* snaps) const
{
    const std::size_t M = modes_->size();
    if (state.u.size() != M) throw InvalidStateError("advance: window size mismatch");
    const long first = state.first_index;
    const long kl = state.k - first;
    // Right after an event u_{k-1} = 0 exactly and u_{k-1} is about to increase.
    bool fresh = kl >= 1 && kl <= long(M) && state.u[kl - 1] == 0.0;
    if (!fresh && !check_membership(state.u, first, state.k))
        throw PhaseConsistencyError("advance: state is not in X_" + std::to_string(state.k));
    if (fresh) verify_phase_state(state.u, first, state.k, INFINITY, state.t, state.k - 1);
    const double S = std::max(0.0, horizon - state.t);
    LinearFlow flow(modes_, state.u, source_vector(M, first, state.k));

    AdvanceResult res;
    std::optional<double> s_event;

    if (kl >= 0 && kl < long(M)) {
        const auto comp = flow.component(std::size_t(kl));
        std::vector<LinearFlow::Component> left, right;
        if (kl >= 1) left.push_back(flow.component(std::size_t(kl - 1)));
        for (long r = 1; r <= opts_.neighbor_radius && kl + r < long(M); ++r) right.push_back(flow.component(std::size_t(kl + r)));

        double s = 0.0;
        double v = comp.value(0.0);
        while (s < S) {
            double d = comp.derivative(s);
            double B = comp.curvature_bound(s);
            // u_k(s + h) <= v + d h + B h^2 / 2, so no crossing before the root.
            double h_safe;
            if (B > 0.0)
                h_safe = (-d + std::sqrt(d * d - 2.0 * B * v)) / B;
            else
                h_safe = d > 0.0 ? -v / d : INFINITY;
            double h = std::clamp(h_safe, opts_.h_min, opts_.h_max + opts_.h_max_growth * s);
            double s_next = std::min(s + h, S);
            double v_next = comp.value(s_next);
            ++res.scan_points;
            if (v_next >= 0.0) {
                double a = s, b = s_next;
                while (b - a > opts_.bisect_width) {
                    double mid = 0.5 * (a + b);
                    if (mid <= a || mid >= b) break;
                    if (comp.value(mid) < 0.0)
                        a = mid;
                    else
                        b = mid;
                }
                double mid = 0.5 * (a + b);
                double dm = comp.derivative(mid);
                double star = b;
                if (dm > 0.0) {
                    double newton = mid - comp.value(mid) / dm;
                    if (newton >= a && newton <= b) star = newton;
                }
                s_event = star;
                break;
            }
            double tt = state.t + s_next;
            if (!(v_next > -2.0)) throw PhaseConsistencyError(site_msg("interface site left (-2, 0)", state.k, v_next, tt));
            if (!left.empty()) {
                double vl = left.front().value(s_next);
                if (!(vl > 0.0)) throw SequentialityViolation(site_msg("left neighbour reached 0 first", state.k - 1, vl, tt));
            }
            for (std::size_t r = 0; r < right.size(); ++r) {
                double vr = right[r].value(s_next);
                if (!(vr < 0.0)) throw SequentialityViolation(site_msg("right neighbour reached 0 first", state.k + long(r) + 1, vr, tt));
            }
            s = s_next;
            v = v_next;
            if (res.scan_points > 100000000) throw InconsistencyError("advance: event scan did not terminate");
        }
    }

    const double s_end = s_event ? *s_event : S;
    if (snaps) {
        auto lo = std::lower_bound(snapshot_times.begin(), snapshot_times.end(), state.t);
        for (auto it = lo; it != snapshot_times.end(); ++it) {
            double ts = *it;
            if (s_event ? !(ts < state.t + s_end) : !(ts <= horizon)) break;
            Vec u = flow.state(ts - state.t);
            verify_phase_state(u, first, state.k, state.D, ts, first - 1);
            snaps->push_back({state.k, ts, first, std::move(u), state.D});
        }
    }

    if (!s_event) {
        res.state = {state.k, horizon, first, flow.state(S), state.D};
        verify_phase_state(res.state.u, first, state.k, state.D, horizon, first - 1);
        return res;
    }

    const double s_star = *s_event;
    const double t_star = state.t + s_star;
    const auto comp = flow.component(std::size_t(kl));
    const double resid = std::abs(comp.value(s_star));
    if (resid > opts_.event_tol) {
        std::ostringstream os;
        os.precision(17);
        os << "advance: event at t=" << t_star << " located only to |u_k|=" << resid;
        throw InconsistencyError(os.str());
    }
    Vec u = flow.state(s_star);
    u[kl] = 0.0;
    verify_phase_state(u, first, state.k + 1, state.D, t_star, state.k);

    TransitionEvent ev;
    ev.k = state.k;
    ev.t_star = t_star;
    ev.u_left = kl >= 1 ? u[kl - 1] : NAN;
    ev.udot_before = comp.derivative(s_star);
    Vec lap = discrete_laplacian(u, BoundaryCondition::neumann());
    ev.udot_after = lap[kl] + source_vector(M, first, state.k + 1)[kl];
    ev.residual = resid;

    res.event = ev;
    res.state = {state.k + 1, t_star, first, std::move(u), state.D};
    return res;
}

double minimal_gap(double D)
{
    if (D <= 2.0) return INFINITY;
    return 0.5 * std::log((D + 2.0) / (D - 2.0));
}

SingleInterfaceRun run_single_interface(const LatticeState& initial, double horizon,
                                        const std::vector<double>& snapshot_times, SolverOptions opts)
{
    initial.validate();
    if (initial.bc.kind == BoundaryCondition::Kind::dirichlet)
        throw ConfigError("single-interface solver supports Neumann or window boundaries only");
    if (horizon < initial.t) throw ConfigError("single-interface: horizon before initial time");
    const long first = initial.first_index;
    const long k1 = interface_index(initial.u, first);
    if (!check_membership(initial.u, first, k1))
        throw PhaseConsistencyError("single-interface: initial data not in X_" + std::to_string(k1));

    SingleInterfaceRun run;
    run.horizon = horizon;
    run.t0 = initial.t;
    run.log.D = std::max(2.0, *std::max_element(initial.u.begin(), initial.u.end()));

    std::vector<double> snaps = snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

    SingleInterfaceSolver solver(initial.u.size(), opts);
    SingleInterfaceState st{k1, initial.t, first, initial.u, run.log.D};
    for (;;) {
        auto res = solver.advance_to_next_transition(st, horizon, snaps, &run.snapshots);
        run.scan_points += res.scan_points;
        st = std::move(res.state);
        if (!res.event) break;
        run.log.events.push_back(*res.event);
        if (st.k > initial.last_index())
            throw ConfigError("single-interface: interface left the window at t=" + std::to_string(st.t));
    }
    run.final_state = st;

    long d = std::min(k1 - first, initial.last_index() - st.k);
    d = std::max<long>(d, 1);
    double t = std::max(horizon - initial.t, 0.0);
    auto row = kernel::bessel_row(t, d);
    double inside = row[0];
    for (long j = 1; j < d; ++j) inside += 2.0 * row[j];
    run.boundary_effect = std::max(0.0, 1.0 - inside);
    return run;
}

bool LogCheck::ok(double tol) const
{
    return increasing && sequential && min_u_left_margin > 0.0 && max_jump_error <= tol && min_gap_margin >= -tol;
}

LogCheck check_log(const TransitionLog& log)
{
    LogCheck c;
    const double gap = minimal_gap(log.D);
    for (std::size_t n = 0; n < log.events.size(); ++n) {
        const auto& e = log.events[n];
        if (std::isfinite(e.u_left)) c.min_u_left_margin = std::min(c.min_u_left_margin, e.u_left - 2.0);
        c.max_jump_error = std::max(c.max_jump_error, std::abs(e.jump() - 4.0));
        if (n > 0) {
            const auto& p = log.events[n - 1];
            if (!(e.t_star > p.t_star)) c.increasing = false;
            if (e.k != p.k + 1) c.sequential = false;
            double margin = std::isfinite(gap) ? (e.t_star - p.t_star) - gap : INFINITY;
            c.min_gap_margin = std::min(c.min_gap_margin, margin);
        }
    }
    return c;
}

Vec p_from_u(const Vec& u)
{
    Vec p(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = u[i] - (u[i] >= 0.0 ? 1.0 : -1.0);
    return p;
}

Vec regular_part(const Vec& p0, double t, const kernel::KernelSource& kern)
{
    return apply_neumann_images(kern.row(t, kernel::truncation_radius(t)), p0);
}

Vec singular_part(const TransitionLog& log, long first_index, std::size_t size, double t,
                  const kernel::KernelSource& kern)
{
    const long M = long(size);
    const long P = 2 * M;
    Vec r(size, 0.0);
    for (const auto& e : log.events) {
        if (e.t_star > t) break;
        double s = t - e.t_star;
        long R = kernel::truncation_radius(s);
        auto row = kern.row(s, R);
        Vec W(P, 0.0);
        for (long n = -R; n <= R; ++n) W[((n % P) + P) % P] += row[std::abs(n)];
        long kl = e.k - first_index;
        for (long j = 0; j < M; ++j) {
            long a = ((j - kl) % P + P) % P;
            long b = ((j + kl + 1) % P + P) % P;
            r[j] -= 2.0 * (W[a] + W[b]);
        }
    }
    return r;
}

Decomposition decompose(const SingleInterfaceRun& run, const Vec& p0, const kernel::KernelSource& kern, double tol)
{
    Decomposition dec;
    for (const auto& snap : run.snapshots) {
        if (snap.u.size() != p0.size()) throw DecompositionMismatch("decompose: snapshot size differs from p0");
        Vec p = p_from_u(snap.u);
        Vec q = regular_part(p0, snap.t - run.t0, kern);
        Vec r = singular_part(run.log, snap.first_index, p0.size(), snap.t, kern);
        double res = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) res = std::max(res, std::abs(p[i] - q[i] - r[i]));
        dec.times.push_back(snap.t);
        dec.q.push_back(std::move(q));
        dec.r.push_back(std::move(r));
        dec.residual.push_back(res);
        dec.max_residual = std::max(dec.max_residual, res);
    }
    if (dec.max_residual > tol) {
        std::ostringstream os;
        os << "decompose: reconstruction residual " << dec.max_residual << " exceeds " << tol;
        throw DecompositionMismatch(os.str());
    }
    return dec;
}

} // namespace fbd::si
