#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "dyonlab/errors.hpp"
#include "dyonlab/model.hpp"

namespace dyonlab {

enum class EventKind {
    value_crosses_threshold,
    derivative_changes_sign,
    blow_up_guard,
    // extension used by the B2 proxy: y/rho crosses a threshold
    value_over_rho_crosses_threshold,
};

enum class EventDirection { up, down, either };

/// Classification trigger monitored during integration.
struct EventSpec {
    EventKind kind = EventKind::blow_up_guard;
    double threshold = 1.0e6;
    EventDirection direction = EventDirection::either;

    static EventSpec value_crossing(double threshold, EventDirection dir);
    static EventSpec deriv_sign_change(EventDirection dir);
    static EventSpec blow_up(double threshold = 1.0e6);
    static EventSpec ratio_crossing(double threshold, EventDirection dir);

    double eval(double rho, double y, double dy) const;
    bool triggered(double g_old, double g_new) const;
};

enum class TerminalKind { reached_end, event };

/// Dense record of one integration: samples in integration order plus how
/// the run ended. When an event fires, rho_hit is bracketed within one step
/// and refined by bisection on the dense output to 1e-10 relative.
struct Trajectory {
    std::vector<StateVector> samples;
    TerminalKind terminal = TerminalKind::reached_end;
    int event_index = -1;
    double rho_hit = std::numeric_limits<double>::quiet_NaN();
    StateVector final_state;
    long steps = 0;
};

struct IntegrateOptions {
    double tol = 1.0e-10;          // local error per step, absolute+relative
    bool record_steps = false;     // keep every accepted step in samples
    const Eigen::ArrayXd* output_nodes = nullptr;  // ascending; hit exactly
    bool record_nodes = true;      // push node landings into samples
    long max_steps = 200'000'000;
    double event_refine_rel = 1.0e-10;
    double max_step = std::numeric_limits<double>::infinity();
    double max_step_rel = std::numeric_limits<double>::infinity();  // h <= c*rho
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                        c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                        e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State2 {
    double y = 0.0, dy = 0.0;
};

// Quintic Hermite dense output over one step, built from value, derivative
// and second derivative at both endpoints (k1 and the FSAL stage).
struct DenseStep {
    double rho0 = 0, h = 1;
    double A = 0, B = 0, C = 0, D = 0, E = 0, F = 0;
    void build(double rho0_, double h_, const State2& s0, double ddy0,
               const State2& s1, double ddy1) {
        rho0 = rho0_;
        h = h_;
        A = s0.y;
        B = h * s0.dy;
        C = 0.5 * h * h * ddy0;
        const double r0 = s1.y - A - B - C;
        const double r1 = h * s1.dy - B - 2.0 * C;
        const double r2 = h * h * ddy1 - 2.0 * C;
        D = 10.0 * r0 - 4.0 * r1 + 0.5 * r2;
        E = -15.0 * r0 + 7.0 * r1 - r2;
        F = 6.0 * r0 - 3.0 * r1 + 0.5 * r2;
    }
    State2 eval(double rho) const {
        const double s = (rho - rho0) / h;
        State2 out;
        out.y = A + s * (B + s * (C + s * (D + s * (E + s * F))));
        out.dy = (B + s * (2 * C + s * (3 * D + s * (4 * E + s * 5 * F)))) / h;
        return out;
    }
};

constexpr size_t max_events = 8;

}  // namespace detail

/// Adaptive explicit integration of y'' = rhs(rho, y, y') from start.rho to
/// rho_end (either direction) with event detection. The trajectory stops at
/// the first triggered event or at rho_end. A blow-up guard hit is reported
/// as an event, not an error; a step-size underflow throws StiffnessError.
/// With output_nodes set the stepper lands on each listed node exactly and
/// records it, so node values carry no interpolation error.
template <class Rhs>
Trajectory integrate_to_event(const StateVector& start, Rhs&& rhs,
                              std::span<const EventSpec> events, double rho_end,
                              const IntegrateOptions& opt = {}) {
    using detail::State2;
    if (!(start.rho > 0.0)) throw DomainError("integrate: start.rho must be > 0");
    if (!(opt.tol >= 1e-13 && opt.tol <= 1e-6))
        throw ConfigError("integrate: tol must lie in [1e-13, 1e-6]");
    if (!std::isfinite(start.y) || !std::isfinite(start.dy))
        throw DomainError("integrate: non-finite start state");
    if (events.size() > detail::max_events)
        throw ConfigError("integrate: too many events");

    const double dir = rho_end >= start.rho ? 1.0 : -1.0;
    Trajectory out;
    out.final_state = start;

    double rho = start.rho;
    State2 s{start.y, start.dy};
    State2 comp;  // Kahan compensation carried across steps

    const Eigen::ArrayXd* nodes = opt.output_nodes;
    Eigen::Index node_i = 0;
    const Eigen::Index node_step = dir > 0 ? 1 : -1;
    if (nodes) {
        if (dir > 0) {
            node_i = 0;
            while (node_i < nodes->size() && (*nodes)(node_i) <= rho) ++node_i;
        } else {
            node_i = nodes->size() - 1;
            while (node_i >= 0 && (*nodes)(node_i) >= rho) --node_i;
        }
    }
    auto node_pending = [&]() -> bool {
        if (!nodes || node_i < 0 || node_i >= nodes->size()) return false;
        return dir * ((*nodes)(node_i)-rho_end) <= 0.0;
    };

    if (opt.record_steps) out.samples.push_back(start);

    std::array<double, detail::max_events> g_old{}, g_probe{};
    double ddy0 = rhs(rho, s.y, s.dy);
    for (size_t i = 0; i < events.size(); ++i)
        g_old[i] = events[i].eval(rho, s.y, s.dy);

    double h_nat = dir * std::min({0.02 * std::max(rho, 1e-2),
                                   std::abs(rho_end - rho), 1.0});
    if (h_nat == 0.0) h_nat = dir * 1e-8;

    detail::DenseStep dense;
    long steps = 0;
    while (dir * (rho_end - rho) > 0.0) {
        if (++steps > opt.max_steps)
            throw StiffnessError("integrate: step budget exhausted");

        // clip the executed step to targets without disturbing h_nat
        double h = h_nat;
        if (std::abs(h) > opt.max_step) h = dir * opt.max_step;
        const double cap_rel = opt.max_step_rel * rho;
        if (std::abs(h) > cap_rel) h = dir * cap_rel;
        int clip = 0;  // 0 free, 1 rho_end, 2 node
        if (std::abs(h) >= std::abs(rho_end - rho)) {
            h = rho_end - rho;
            clip = 1;
        }
        if (node_pending()) {
            const double to_node = (*nodes)(node_i)-rho;
            if (std::abs(to_node) <= std::abs(h)) {
                h = to_node;
                clip = 2;
            }
        }

        using namespace detail;
        const double k1y = s.dy, k1d = ddy0;
        double ry = s.y + h * a21 * k1y;
        double rd = s.dy + h * a21 * k1d;
        const double k2y = rd, k2d = rhs(rho + c2 * h, ry, rd);
        ry = s.y + h * (a31 * k1y + a32 * k2y);
        rd = s.dy + h * (a31 * k1d + a32 * k2d);
        const double k3y = rd, k3d = rhs(rho + c3 * h, ry, rd);
        ry = s.y + h * (a41 * k1y + a42 * k2y + a43 * k3y);
        rd = s.dy + h * (a41 * k1d + a42 * k2d + a43 * k3d);
        const double k4y = rd, k4d = rhs(rho + c4 * h, ry, rd);
        ry = s.y + h * (a51 * k1y + a52 * k2y + a53 * k3y + a54 * k4y);
        rd = s.dy + h * (a51 * k1d + a52 * k2d + a53 * k3d + a54 * k4d);
        const double k5y = rd, k5d = rhs(rho + c5 * h, ry, rd);
        ry = s.y + h * (a61 * k1y + a62 * k2y + a63 * k3y + a64 * k4y + a65 * k5y);
        rd = s.dy + h * (a61 * k1d + a62 * k2d + a63 * k3d + a64 * k4d + a65 * k5d);
        const double k6y = rd, k6d = rhs(rho + h, ry, rd);
        const double incy =
            h * (b1 * k1y + b3 * k3y + b4 * k4y + b5 * k5y + b6 * k6y);
        const double incd =
            h * (b1 * k1d + b3 * k3d + b4 * k4d + b5 * k5d + b6 * k6d);
        State2 snew, cnew = comp;
        {
            double t = incy - cnew.y;
            snew.y = s.y + t;
            cnew.y = (snew.y - s.y) - t;
            t = incd - cnew.dy;
            snew.dy = s.dy + t;
            cnew.dy = (snew.dy - s.dy) - t;
        }
        const double rho_new = clip == 1   ? rho_end
                               : clip == 2 ? (*nodes)(node_i)
                                           : rho + h;
        const double k7y = snew.dy, k7d = rhs(rho_new, snew.y, snew.dy);
        const double erry = h * (e1 * k1y + e3 * k3y + e4 * k4y + e5 * k5y +
                                 e6 * k6y + e7 * k7y);
        const double errd = h * (e1 * k1d + e3 * k3d + e4 * k4d + e5 * k5d +
                                 e6 * k6d + e7 * k7d);
        const double scy =
            opt.tol * (1.0 + std::max(std::abs(s.y), std::abs(snew.y)));
        const double scd =
            opt.tol * (1.0 + std::max(std::abs(s.dy), std::abs(snew.dy)));
        const double err = std::sqrt(
            0.5 * ((erry / scy) * (erry / scy) + (errd / scd) * (errd / scd)));

        if (!std::isfinite(err) || err > 1.0) {
            const double fac = std::isfinite(err)
                                   ? std::max(0.2, 0.9 * std::pow(err, -0.2))
                                   : 0.2;
            h_nat = h * fac;
            if (std::abs(h_nat) < 16.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(std::abs(rho), 1e-3))
                throw StiffnessError("integrate: step size underflow");
            --steps;
            continue;
        }

        dense.build(rho, h, s, ddy0, snew, k7d);

        // event scan: endpoint plus interior probes of the dense output
        int fired = -1;
        double br_lo = rho, br_hi = rho_new;
        g_probe = g_old;
        double probe_lo = rho;
        for (int p = 1; p <= 4 && fired < 0; ++p) {
            const double rp = p == 4 ? rho_new : rho + h * (0.25 * p);
            const State2 sp = p == 4 ? snew : dense.eval(rp);
            for (size_t i = 0; i < events.size(); ++i) {
                const double gn = events[i].eval(rp, sp.y, sp.dy);
                if (fired < 0 && events[i].triggered(g_probe[i], gn)) {
                    fired = static_cast<int>(i);
                    br_lo = probe_lo;
                    br_hi = rp;
                }
                g_probe[i] = gn;
            }
            probe_lo = rp;
        }

        if (fired >= 0) {
            const EventSpec& ev = events[fired];
            double lo = br_lo, hi = br_hi;
            {
                const State2 sl = dense.eval(lo);
                double glo = ev.eval(lo, sl.y, sl.dy);
                for (int it = 0; it < 60; ++it) {
                    if (std::abs(hi - lo) <=
                        opt.event_refine_rel * std::max(std::abs(hi), 1e-30))
                        break;
                    const double mid = 0.5 * (lo + hi);
                    const State2 sm = dense.eval(mid);
                    const double gm = ev.eval(mid, sm.y, sm.dy);
                    if (ev.triggered(glo, gm)) {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                }
            }
            const double rho_hit = 0.5 * (lo + hi);
            const State2 sh = dense.eval(rho_hit);
            out.terminal = TerminalKind::event;
            out.event_index = fired;
            out.rho_hit = rho_hit;
            out.final_state = {rho_hit, sh.y, sh.dy};
            if (opt.record_steps) out.samples.push_back(out.final_state);
            out.steps = steps;
            return out;
        }

        rho = rho_new;
        s = snew;
        comp = cnew;
        ddy0 = k7d;  // FSAL
        for (size_t i = 0; i < events.size(); ++i) g_old[i] = g_probe[i];

        if (clip == 2) {
            if (opt.record_nodes) out.samples.push_back({rho, s.y, s.dy});
            node_i += node_step;
        } else if (opt.record_steps) {
            out.samples.push_back({rho, s.y, s.dy});
        }

        if (clip == 0) {
            const double fac =
                std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
            h_nat = h * fac;
        }
        if (!std::isfinite(s.y) || !std::isfinite(s.dy))
            throw StiffnessError("integrate: state became non-finite");
    }

    out.terminal = TerminalKind::reached_end;
    out.final_state = {rho, s.y, s.dy};
    out.steps = steps;
    return out;
}

}  // namespace dyonlab
