#include "dyonlab/shoot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace dyonlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- hot-path RHS functors over frozen fields ----

struct FOde {
    FrozenField J, h;
    double operator()(double rho, double f, double) const {
        const double hv = h(rho), Jv = J(rho);
        const double inv = 1.0 / (rho * rho);
        return 2.0 * f * inv + hv * hv * (f + 1.0) +
               (f * f * (3.0 + f) - Jv * Jv * (f + 1.0)) * inv;
    }
};

struct HOde {  // H = rho * h
    FrozenField F;
    double beta2;
    double operator()(double rho, double H, double) const {
        const double Fv = F(rho);
        const double inv = 1.0 / (rho * rho);
        return 2.0 * Fv * Fv * H * inv + 0.5 * beta2 * H * (H * H * inv - 1.0);
    }
};

struct ChiOde {  // chi = h - 1, kept cancellation-free for the inward tail
    FrozenField F;
    double beta2;
    double operator()(double rho, double chi, double dchi) const {
        const double Fv = F(rho);
        const double h = 1.0 + chi;
        return (2.0 * Fv * Fv * h +
                0.5 * beta2 * h * chi * (2.0 + chi) * rho * rho -
                2.0 * dchi * rho) /
               (rho * rho);
    }
};

struct JOde {
    FrozenField F;
    double operator()(double rho, double Jv, double) const {
        const double Fv = F(rho);
        return 2.0 * Jv * Fv * Fv / (rho * rho);
    }
};

// Log-derivative form of the linearized F tail: w' = u, u' = q - u^2 with
// q = h^2 - (1 + J^2)/rho^2 (the F^2 correction is below 1e-12 out here).
struct FRiccati {
    FrozenField J, h;
    double operator()(double rho, double, double u) const {
        const double hv = h(rho), Jv = J(rho);
        const double q = hv * hv - (1.0 + Jv * Jv) / (rho * rho);
        return q - u * u;
    }
};

// ---- node-aligned integration runs ----

struct NodeRun {
    Eigen::ArrayXd y, dy;        // aligned to grid nodes; NaN where unreached
    Eigen::Index last = -1;      // outward: last index reached
    Eigen::Index first = -1;     // inward: first (lowest) index reached
    TerminalKind terminal = TerminalKind::reached_end;
};

template <class Rhs>
NodeRun run_outward(Rhs& rhs, const RadialGrid& g, double y0, double dy0,
                    double tol, double guard) {
    const Eigen::Index n = g.size();
    NodeRun r;
    r.y = Eigen::ArrayXd::Constant(n, kNaN);
    r.dy = Eigen::ArrayXd::Constant(n, kNaN);
    r.y(0) = y0;
    r.dy(0) = dy0;
    const std::array<EventSpec, 1> evs{EventSpec::blow_up(guard)};
    IntegrateOptions opt;
    opt.tol = tol;
    opt.output_nodes = &g.nodes;
    Trajectory t = integrate_to_event({g.rho0(), y0, dy0}, rhs, evs,
                                      g.rho_max(), opt);
    Eigen::Index i = 1;
    for (const StateVector& s : t.samples) {
        r.y(i) = s.y;
        r.dy(i) = s.dy;
        ++i;
    }
    r.last = i - 1;
    r.first = 0;
    r.terminal = t.terminal;
    return r;
}

template <class Rhs>
NodeRun run_inward(Rhs& rhs, const RadialGrid& g, double y0, double dy0,
                   Eigen::Index start_idx, Eigen::Index stop_idx, double tol,
                   double guard) {
    const Eigen::Index n = g.size();
    NodeRun r;
    r.y = Eigen::ArrayXd::Constant(n, kNaN);
    r.dy = Eigen::ArrayXd::Constant(n, kNaN);
    r.y(start_idx) = y0;
    r.dy(start_idx) = dy0;
    const std::array<EventSpec, 1> evs{EventSpec::blow_up(guard)};
    IntegrateOptions opt;
    opt.tol = tol;
    opt.output_nodes = &g.nodes;
    Trajectory t = integrate_to_event({g.nodes(start_idx), y0, dy0}, rhs, evs,
                                      g.nodes(stop_idx), opt);
    Eigen::Index i = start_idx - 1;
    for (const StateVector& s : t.samples) {
        r.y(i) = s.y;
        r.dy(i) = s.dy;
        --i;
    }
    r.first = i + 1;
    r.last = start_idx;
    r.terminal = t.terminal;
    return r;
}

// decay scale of the frozen pair near rho_max; clamped to a sane range
double nu_hat_of(const Profile& J, const Profile& h) {
    const Eigen::Index n = h.values.size();
    const double hm = h.values(n - 1);
    const double cm = J.values(n - 1) / J.grid->rho_max();
    const double q = hm * hm - cm * cm;
    return std::sqrt(std::clamp(q, 1.0e-2, 4.0));
}

// decay scale of a frozen F profile via its log-derivative at the far end
double f_decay_rate(const Profile& F) {
    const Eigen::Index n = F.values.size();
    for (Eigen::Index i = n - 1; i > n / 2; --i) {
        if (F.values(i) > 1.0e-250)
            return std::clamp(-F.derivs(i) / F.values(i), 0.05, 4.0);
    }
    return 1.0;
}

// Radius out to which a trajectory within per-step error ~tol can still be
// distinguished from the stable manifold against the e^{rate*rho} unstable
// mode; beyond it classification events fire on integration noise.
double accept_horizon(double rho_max, double tol, double rate) {
    const double r = std::max(0.5 * std::log(1.0 / tol) - 2.5, 2.0) / rate;
    return std::min(rho_max, r);
}

// quintic smoothstep
inline double smooth01(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
inline double smooth01_d(double t) { return 30.0 * t * t * (1.0 + t * (-2.0 + t)); }

std::string scan_report(const std::vector<std::pair<double, ShotTag>>& seen) {
    std::ostringstream os;
    for (const auto& [p, t] : seen) {
        os << " (" << p << " -> "
           << (t == ShotTag::A1   ? "A1"
               : t == ShotTag::A2 ? "A2"
               : t == ShotTag::B1 ? "B1"
               : t == ShotTag::B2 ? "B2"
                                  : "accept")
           << ")";
    }
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------- classify

ShootingOutcome classify_f(double a, const Profile& Jp, const Profile& hp,
                           const ShootOptions& opt) {
    if (!(a < 0.0)) throw DomainError("classify_f: requires a < 0");
    if (Jp.grid != hp.grid)
        throw ConfigError("classify_f: frozen profiles must share one grid");
    const RadialGrid& g = *hp.grid;

    FOde rhs{FrozenField::electric(Jp), FrozenField::higgs(hp)};
    const auto [f0, df0] = f_series(a, rhs.J, rhs.h, g.rho0());

    const std::array<EventSpec, 3> evs{
        EventSpec::deriv_sign_change(EventDirection::up),       // A1
        EventSpec::value_crossing(-1.0, EventDirection::down),  // A2
        EventSpec::blow_up(opt.blow_up)};
    IntegrateOptions io;
    io.tol = opt.ode_tol;
    io.max_step = opt.classify_max_step;
    io.max_step_rel = opt.classify_max_step_rel;
    io.record_steps = opt.record_classify;
    if (opt.classify_forced) {
        io.output_nodes = &g.nodes;
        io.record_nodes = false;
    }
    Trajectory t =
        integrate_to_event({g.rho0(), f0, df0}, rhs, evs, g.rho_max(), io);

    const double nu_hat = nu_hat_of(Jp, hp);
    const double rho_acc = accept_horizon(g.rho_max(), opt.ode_tol, nu_hat);

    ShootingOutcome out;
    if (t.terminal == TerminalKind::event) {
        out.rho_event = t.rho_hit;
        out.steer = t.event_index == 0   ? ShotTag::A1
                    : t.event_index == 1 ? ShotTag::A2
                    : (t.final_state.y > 0.0 ? ShotTag::A1 : ShotTag::A2);
        out.tag = (t.rho_hit > rho_acc) ? ShotTag::accept : out.steer;
    } else {
        // reached rho_max without events; steer by the defect against a
        // purely decaying terminal state
        const double D =
            t.final_state.dy + nu_hat * (t.final_state.y + 1.0);
        out.steer = D > 0.0 ? ShotTag::A1 : ShotTag::A2;
        out.tag = ShotTag::accept;
    }
    out.trajectory = std::move(t);
    return out;
}

ShootingOutcome classify_h(double b, const Profile& Fp, double beta,
                           const ShootOptions& opt) {
    if (!(b > 0.0)) throw DomainError("classify_h: requires b > 0");
    if (!(beta > 0.0)) throw DomainError("classify_h: requires beta > 0");
    const RadialGrid& g = *Fp.grid;

    HOde rhs{FrozenField::gauge(Fp), beta * beta};
    const auto [H0, dH0] = h_series(b, rhs.F, beta, g.rho0());

    const std::array<EventSpec, 3> evs{
        EventSpec::deriv_sign_change(EventDirection::down),  // B1: H' < 0
        EventSpec::ratio_crossing(1.0 + opt.b2_margin,
                                  EventDirection::up),  // B2 proxy on h
        EventSpec::blow_up(opt.blow_up)};
    IntegrateOptions io;
    io.tol = opt.ode_tol;
    io.max_step = opt.classify_max_step;
    io.max_step_rel = opt.classify_max_step_rel;
    io.record_steps = opt.record_classify;
    if (opt.classify_forced) {
        io.output_nodes = &g.nodes;
        io.record_nodes = false;
    }
    Trajectory t =
        integrate_to_event({g.rho0(), H0, dH0}, rhs, evs, g.rho_max(), io);

    const double rate = std::max(beta, 0.25);
    const double rho_acc = accept_horizon(g.rho_max(), opt.ode_tol, rate);

    ShootingOutcome out;
    if (t.terminal == TerminalKind::event) {
        out.rho_event = t.rho_hit;
        out.steer = t.event_index == 0 ? ShotTag::B1 : ShotTag::B2;
        out.tag = (t.rho_hit > rho_acc) ? ShotTag::accept : out.steer;
    } else {
        const double h_end = t.final_state.y / g.rho_max();
        out.steer = h_end < 1.0 ? ShotTag::B1 : ShotTag::B2;
        out.tag = ShotTag::accept;
    }
    out.trajectory = std::move(t);
    return out;
}

// ---------------------------------------------------------------- solve_f

FSolve solve_f(const Profile& Jp, const Profile& hp, const ShootOptions& opt) {
    if (Jp.grid != hp.grid)
        throw ConfigError("solve_f: frozen profiles must share one grid");
    auto grid = hp.grid;
    const RadialGrid& g = *grid;
    const Eigen::Index n = g.size();

    ShootOptions copt = opt;
    copt.record_classify = false;
    auto steer_of = [&](double a) {
        return classify_f(a, Jp, hp, copt).steer;
    };

    // geometric scan for the A1/A2 bracket (A1 at small |a|); only
    // event-backed classifications count toward the bracket
    std::vector<std::pair<double, ShotTag>> seen;
    double a_hi = 0.0, a_lo = 0.0;  // a_hi: A1 side (closer to 0), a_lo: A2
    bool have_hi = false, have_lo = false;
    for (double x = opt.scan_lo; x <= opt.scan_hi * 1.0000001; x *= 10.0) {
        const ShootingOutcome out = classify_f(-x, Jp, hp, copt);
        seen.emplace_back(-x, out.steer);
        if (!out.rho_event.has_value()) continue;
        if (out.steer == ShotTag::A1) {
            if (have_lo)
                throw ShootingError(
                    "solve_f: scan classified A1 above an A2 value;"
                    " classification inconsistent:" +
                    scan_report(seen));
            a_hi = -x;
            have_hi = true;
        } else if (out.steer == ShotTag::A2) {
            a_lo = -x;
            have_lo = true;
            break;
        }
    }
    if (!have_hi || !have_lo)
        throw ShootingError(std::string("solve_f: no ") +
                            (have_hi ? "A2" : "A1") +
                            " found in scan:" + scan_report(seen));

    // bisection; one endpoint stays A1, the other A2
    const double btol = std::max(opt.bisect_tol, 4.0e-16);
    ShootOptions fine = copt;
    fine.classify_forced = true;
    for (int it = 0; it < opt.max_bisect; ++it) {
        const double width_rel =
            std::abs(a_hi - a_lo) /
            std::max(std::abs(a_hi), std::abs(a_lo));
        if (width_rel <= btol) break;
        const double mid = 0.5 * (a_hi + a_lo);
        if (mid == a_hi || mid == a_lo) break;
        const ShotTag s = width_rel <= opt.fine_bisect_rel
                              ? classify_f(mid, Jp, hp, fine).steer
                              : steer_of(mid);
        if (s == ShotTag::A1)
            a_hi = mid;
        else if (s == ShotTag::A2)
            a_lo = mid;
        else
            throw ShootingError("solve_f: mid-point classification failed");
    }
    const double a_star = 0.5 * (a_hi + a_lo);

    // final trajectories on grid nodes (no classification events); two
    // probes at the resolved bracket width measure where the unstable mode
    // takes over
    FOde rhs{FrozenField::electric(Jp), FrozenField::higgs(hp)};
    auto launch_run = [&](double a) {
        const auto [f0, df0] = f_series(a, rhs.J, rhs.h, g.rho0());
        return run_outward(rhs, g, f0, df0, opt.ode_tol, opt.blow_up);
    };
    const double probe_w =
        std::max(0.5 * (a_hi - a_lo), 1.0e-12 * std::abs(a_star));
    const NodeRun mid = launch_run(a_star);
    const NodeRun rlo = launch_run(a_star - probe_w);
    const NodeRun rhi = launch_run(a_star + probe_w);

    // trusted while the bracket endpoints agree to trust_rel of F
    Eigen::Index i_trust = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > mid.last || i > rlo.last || i > rhi.last) break;
        const double Fv = mid.y(i) + 1.0;
        const double delta = std::abs(rhi.y(i) - rlo.y(i));
        if (!(Fv > 0.0) || delta > std::max(opt.trust_rel * Fv, 1.0e-18)) break;
        i_trust = i;
    }
    if (g.nodes(i_trust) < std::min(2.0, 0.3 * g.rho_max()))
        throw ShootingError(
            "solve_f: shooting bracket resolves F only to rho = " +
            std::to_string(g.nodes(i_trust)));

    Eigen::ArrayXd Fv(n), dFv(n);
    double rho_match = g.rho_max();
    double mismatch = 0.0;

    if (i_trust == n - 1) {
        Fv = mid.y + 1.0;
        dFv = mid.dy;
    } else {
        const Eigen::Index im = i_trust;
        rho_match = g.nodes(im);
        const double w = std::min(opt.blend_width,
                                  0.5 * (rho_match - g.rho0()));
        Eigen::Index ib = im;
        while (ib > 1 && g.nodes(ib) > rho_match - w) --ib;

        // inward log-derivative integration seeded on the decaying branch
        FRiccati ric{rhs.J, rhs.h};
        const double q_end = ric(g.rho_max(), 0.0, 0.0);
        if (!(q_end > 1.0e-4))
            throw ShootingError(
                "solve_f: frozen data inadmissible near rho_max (h^2 - C^2 "
                "<= 0)");
        const double u_end = -std::sqrt(q_end);
        NodeRun tail =
            run_inward(ric, g, 0.0, u_end, g.size() - 1, ib, opt.ode_tol,
                       1.0e300);
        if (tail.terminal != TerminalKind::reached_end || tail.first > ib)
            throw ShootingError("solve_f: inward tail integration failed");

        const double F_anchor = mid.y(im) + 1.0;
        const double w_anchor = tail.y(im);
        auto tail_F = [&](Eigen::Index i) {
            return F_anchor * std::exp(tail.y(i) - w_anchor);
        };
        mismatch = std::abs(tail.dy(im) * tail_F(im) - mid.dy(im));

        for (Eigen::Index i = 0; i < n; ++i) {
            if (i <= ib) {
                Fv(i) = mid.y(i) + 1.0;
                dFv(i) = mid.dy(i);
            } else if (i >= im) {
                Fv(i) = tail_F(i);
                dFv(i) = tail.dy(i) * Fv(i);
            } else {
                const double span = rho_match - g.nodes(ib);
                const double t = (g.nodes(i) - g.nodes(ib)) / span;
                const double s = smooth01(t);
                const double sd = smooth01_d(t) / span;
                const double Fo = mid.y(i) + 1.0, Ft = tail_F(i);
                const double dFo = mid.dy(i), dFt = tail.dy(i) * Ft;
                Fv(i) = (1.0 - s) * Fo + s * Ft;
                dFv(i) = (1.0 - s) * dFo + s * dFt + sd * (Ft - Fo);
            }
        }
    }

    FSolve out;
    out.F = Profile(grid, std::move(Fv), std::move(dFv));
    out.a_star = a_star;
    out.rho_match = rho_match;
    out.tail_mismatch = mismatch;
    out.boundary_warning = std::abs(out.F.values(n - 1)) > 1.0e-4;
    return out;
}

// ---------------------------------------------------------------- solve_h

namespace {

HSolve solve_h_linear(const Profile& Fp, const ShootOptions& opt) {
    auto grid = Fp.grid;
    const RadialGrid& g = *grid;
    const Eigen::Index n = g.size();

    HOde rhs{FrozenField::gauge(Fp), 0.0};
    const auto [H0, dH0] = h_series(1.0, rhs.F, 0.0, g.rho0());
    NodeRun run = run_outward(rhs, g, H0, dH0, opt.ode_tol, opt.blow_up);
    if (run.last != n - 1)
        throw ShootingError("solve_h: beta = 0 integration did not reach "
                            "rho_max");

    // h = alpha + gamma/rho far out, and H' = h + rho h' equals alpha there;
    // normalizing by it sends h(infinity) to 1 exactly
    const double alpha = run.dy(n - 1);
    if (!(alpha > 0.0))
        throw ShootingError("solve_h: beta = 0 far-field constant <= 0");

    Eigen::ArrayXd hv(n), dhv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = g.nodes(i);
        hv(i) = run.y(i) / (rho * alpha);
        dhv(i) = (run.dy(i) - run.y(i) / rho) / (rho * alpha);
    }
    HSolve out;
    out.h = Profile(grid, std::move(hv), std::move(dhv));
    out.b_star = 1.0 / alpha;
    out.rho_match = g.rho_max();
    out.tail_mismatch = 0.0;
    out.boundary_warning = false;
    return out;
}

}  // namespace

HSolve solve_h(const Profile& Fp, double beta, const ShootOptions& opt) {
    if (!(beta >= 0.0)) throw DomainError("solve_h: requires beta >= 0");
    if (beta == 0.0) return solve_h_linear(Fp, opt);

    auto grid = Fp.grid;
    const RadialGrid& g = *grid;
    const Eigen::Index n = g.size();

    ShootOptions copt = opt;
    copt.record_classify = false;
    auto steer_of = [&](double b) {
        return classify_h(b, Fp, beta, copt).steer;
    };

    std::vector<std::pair<double, ShotTag>> seen;
    double b_lo = 0.0, b_hi = 0.0;  // b_lo: B1 side, b_hi: B2 side
    bool have_lo = false, have_hi = false;
    for (double b = opt.scan_lo; b <= opt.scan_hi * 1.0000001; b *= 10.0) {
        const ShootingOutcome out = classify_h(b, Fp, beta, copt);
        seen.emplace_back(b, out.steer);
        if (!out.rho_event.has_value()) continue;
        if (out.steer == ShotTag::B1) {
            if (have_hi)
                throw ShootingError(
                    "solve_h: scan classified B1 above a B2 value;"
                    " classification inconsistent:" +
                    scan_report(seen));
            b_lo = b;
            have_lo = true;
        } else if (out.steer == ShotTag::B2) {
            b_hi = b;
            have_hi = true;
            break;
        }
    }
    if (!have_lo || !have_hi)
        throw ShootingError(std::string("solve_h: no ") +
                            (have_lo ? "B2" : "B1") +
                            " found in scan:" + scan_report(seen));

    const double btol = std::max(opt.bisect_tol, 4.0e-16);
    ShootOptions fine = copt;
    fine.classify_forced = true;
    for (int it = 0; it < opt.max_bisect; ++it) {
        const double width_rel = std::abs(b_hi - b_lo) / std::max(b_hi, b_lo);
        if (width_rel <= btol) break;
        const double mid = 0.5 * (b_hi + b_lo);
        if (mid == b_hi || mid == b_lo) break;
        const ShotTag s = width_rel <= opt.fine_bisect_rel
                              ? classify_h(mid, Fp, beta, fine).steer
                              : steer_of(mid);
        if (s == ShotTag::B1)
            b_lo = mid;
        else if (s == ShotTag::B2)
            b_hi = mid;
        else
            throw ShootingError("solve_h: mid-point classification failed");
    }
    const double b_star = 0.5 * (b_hi + b_lo);

    HOde rhs{FrozenField::gauge(Fp), beta * beta};
    auto launch_run = [&](double b) {
        const auto [H0, dH0] = h_series(b, rhs.F, beta, g.rho0());
        return run_outward(rhs, g, H0, dH0, opt.ode_tol, opt.blow_up);
    };
    const double probe_w = std::max(0.5 * (b_hi - b_lo), 1.0e-12 * b_star);
    const NodeRun mid = launch_run(b_star);
    const NodeRun rlo = launch_run(b_star - probe_w);
    const NodeRun rhi = launch_run(b_star + probe_w);

    // work in h = H/rho
    Eigen::ArrayXd hm(n), dhm(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = g.nodes(i);
        hm(i) = mid.y(i) / rho;
        dhm(i) = (mid.dy(i) - hm(i)) / rho;
    }

    Eigen::Index i_trust = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > mid.last || i > rlo.last || i > rhi.last) break;
        const double rho = g.nodes(i);
        const double delta = std::abs(rhi.y(i) - rlo.y(i)) / rho;
        const double chi = std::max(1.0 - hm(i), 1.0e-14);
        if (!(hm(i) > 0.0) || delta > std::max(opt.trust_rel * chi, 1.0e-18))
            break;
        i_trust = i;
    }
    if (g.nodes(i_trust) < std::min(2.0, 0.3 * g.rho_max()))
        throw ShootingError(
            "solve_h: shooting bracket resolves h only to rho = " +
            std::to_string(g.nodes(i_trust)));

    double rho_match = g.rho_max();
    double mismatch = 0.0;
    Eigen::ArrayXd hv = hm, dhv = dhm;

    if (i_trust < n - 1) {
        const Eigen::Index im = i_trust;
        rho_match = g.nodes(im);
        const double w = std::min(opt.blend_width,
                                  0.5 * (rho_match - g.rho0()));
        Eigen::Index ib = im;
        while (ib > 1 && g.nodes(ib) > rho_match - w) --ib;

        const double kappa = std::min(beta, 2.0 * f_decay_rate(Fp));
        const double chi_m = std::max(1.0 - hm(im), 1.0e-16);

        // The inward-growing homogeneous mode has rate beta. Over a span
        // where chi decays by more than ~1e-13/chi_m the seed sensitivity
        // e^{beta*span} exceeds double resolution and even a perfect seed
        // blows up on route, so the matched segment starts at the radius
        // where chi has fallen to a floor; beyond it the tail is the
        // matched exponential, whose values are too small to matter.
        constexpr double chi_floor = 1.0e-13;
        Eigen::Index it_idx = n - 1;
        if (chi_m > chi_floor) {
            const double rho_t =
                rho_match + std::log(chi_m / chi_floor) / kappa;
            while (it_idx > im + 8 && g.nodes(it_idx - 1) > rho_t) --it_idx;
        }
        const double eps_scale = std::max(
            chi_m * std::exp(-beta * (g.nodes(it_idx) - rho_match)), 1.0e-300);

        ChiOde direct{rhs.F, beta * beta};
        auto tail_run = [&](double eps) {
            return run_inward(direct, g, -eps, kappa * eps, it_idx, ib,
                              opt.ode_tol, opt.blow_up);
        };
        // a too-large seed can blow up nonlinearly before reaching the
        // match point; shrinking toward zero is always safe (the driven
        // response stays at the true tail scale)
        auto survive = [&](double& eps) {
            for (int k = 0; k < 60; ++k) {
                NodeRun r = tail_run(eps);
                if (r.first <= im) return r;
                eps *= 0.125;
            }
            throw ShootingError("solve_h: inward tail integration failed");
        };
        // secant iteration on the seed amplitude; the seed-to-value map is
        // nearly linear but the quadratic remainder is visible at the
        // splice, so refine on the true map
        const double chi_target = hm(im) - 1.0;
        double e1 = eps_scale;
        NodeRun tf = survive(e1);
        double p1 = tf.y(im) - chi_target;
        double e2 = 2.0 * e1;
        {
            NodeRun t2 = survive(e2);
            tf = std::move(t2);
        }
        double p2 = tf.y(im) - chi_target;
        for (int it = 0; it < 12; ++it) {
            if (std::abs(p2) <= 1.0e-3 * opt.trust_rel * chi_m) break;
            if (p2 == p1) break;  // resolution floor of the map
            double en = e2 - p2 * (e2 - e1) / (p2 - p1);
            if (!std::isfinite(en)) break;
            NodeRun tn = tail_run(en);
            for (int k = 0; k < 8 && tn.first > im; ++k) {
                en = 0.5 * (en + e2);  // damp toward the last good seed
                tn = tail_run(en);
            }
            if (tn.first > im) break;
            e1 = e2;
            p1 = p2;
            e2 = en;
            p2 = tn.y(im) - chi_target;
            tf = std::move(tn);
        }
        if (tf.first > ib) {
            // the matched run must span the blend window as well
            NodeRun tn = tail_run(e2);
            if (tn.first > ib)
                throw ShootingError("solve_h: inward tail integration failed");
            tf = std::move(tn);
        }
        mismatch = std::abs(tf.dy(im) - dhm(im));

        for (Eigen::Index i = ib + 1; i < n; ++i) {
            if (i > it_idx) {
                // below the chi floor: matched exponential continuation
                const double chi_t = tf.y(it_idx) *
                                     std::exp(-kappa * (g.nodes(i) -
                                                        g.nodes(it_idx)));
                hv(i) = 1.0 + chi_t;
                dhv(i) = -kappa * chi_t;
            } else if (i >= im) {
                hv(i) = 1.0 + tf.y(i);
                dhv(i) = tf.dy(i);
            } else {
                const double span = rho_match - g.nodes(ib);
                const double t = (g.nodes(i) - g.nodes(ib)) / span;
                const double s = smooth01(t);
                const double sd = smooth01_d(t) / span;
                hv(i) = (1.0 - s) * hm(i) + s * (1.0 + tf.y(i));
                dhv(i) = (1.0 - s) * dhm(i) + s * tf.dy(i) +
                         sd * (1.0 + tf.y(i) - hm(i));
            }
        }
    }

    HSolve out;
    out.h = Profile(grid, std::move(hv), std::move(dhv));
    out.b_star = b_star;
    out.rho_match = rho_match;
    out.tail_mismatch = mismatch;
    out.boundary_warning = out.h.values(n - 1) < 1.0 - 1.0e-4;
    return out;
}

// ---------------------------------------------------------------- solve_j

JSolve solve_j(const Profile& Fp, double bigC, const ShootOptions& opt) {
    if (!(bigC >= 0.0 && bigC < 1.0))
        throw DomainError("solve_j: requires 0 <= C < 1");
    auto grid = Fp.grid;
    const RadialGrid& g = *grid;
    const Eigen::Index n = g.size();

    JSolve out;
    if (bigC == 0.0) {
        out.J = Profile(grid, Eigen::ArrayXd::Zero(n), Eigen::ArrayXd::Zero(n));
        out.c_star = 0.0;
        return out;
    }

    JOde rhs{FrozenField::gauge(Fp)};
    const auto [J0, dJ0] = j_series(1.0, rhs.F, g.rho0());
    NodeRun run = run_outward(rhs, g, J0, dJ0, opt.ode_tol, opt.blow_up);
    if (run.last != n - 1)
        throw ShootingError("solve_j: integration did not reach rho_max");

    const double slope_inf = run.dy(n - 1);
    if (!(slope_inf > 0.0))
        throw ShootingError(
            "solve_j: terminal slope <= 0; cannot match J'(rho_max) = C");
    const double scale = bigC / slope_inf;
    out.J = Profile(grid, run.y * scale, run.dy * scale);
    out.c_star = scale;
    return out;
}

}  // namespace dyonlab
