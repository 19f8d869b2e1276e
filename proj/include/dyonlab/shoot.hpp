#pragma once

#include <optional>

#include "dyonlab/grid.hpp"
#include "dyonlab/integrate.hpp"
#include "dyonlab/series.hpp"

namespace dyonlab {

enum class ShotTag { A1, A2, B1, B2, accept };

/// Outcome of launching one trajectory from the origin series.
///
/// tag applies the classification horizon: a trajectory that keeps the
/// accepted-set conditions out to the radius where double precision can
/// still distinguish it from the stable manifold counts as `accept`, even
/// if integrator noise flips it further out. steer records the raw
/// event-based side regardless of the horizon; bisection steers by it.
struct ShootingOutcome {
    ShotTag tag = ShotTag::accept;
    std::optional<double> rho_event;
    ShotTag steer = ShotTag::accept;
    Trajectory trajectory;
};

struct ShootOptions {
    double ode_tol = 1.0e-10;
    double bisect_tol = 1.0e-12;  // relative bracket width
    int max_bisect = 200;
    double blow_up = 1.0e6;
    double b2_margin = 1.0e-3;  // B2 proxy: h exceeding 1 + margin
    // Classification runs cap the step size (absolutely, and relative to
    // rho near the origin): per-step error then sits far below tol, which
    // is what limits how finely bisection can localize the shooting
    // constant against the e^{nu rho} unstable mode. Near rho = 0 a first
    // derivative error delta injected at rho_s rides the growing rho^2 mode
    // with amplitude delta/(2 rho_s), so steps there must shrink like rho.
    double classify_max_step = 0.03;
    double classify_max_step_rel = 0.005;
    // Endgame bisection (bracket below fine_bisect_rel) classifies with
    // node-forced steps, dropping the per-step error to roundoff. Off by
    // default: the capped classification steps already localize the
    // constant well below the trust threshold of the tail splice.
    double fine_bisect_rel = 0.0;
    bool classify_forced = false;
    // Tail assembly: outward data is trusted while two probe trajectories
    // (the shooting constant nudged by the resolved bracket width) agree to
    // trust_rel of the decaying quantity; beyond that the profile comes
    // from a stable inward integration, blended over blend_width in rho.
    double trust_rel = 3.0e-7;
    double blend_width = 2.0;
    double scan_lo = 1.0e-6, scan_hi = 1.0e3;
    bool record_classify = false;  // keep step samples in classify outcomes
};

struct FSolve {
    Profile F;
    double a_star = 0.0;
    double rho_match = 0.0;       // start of the inward tail (rho_max if unused)
    double tail_mismatch = 0.0;   // derivative gap at the splice, diagnostic
    bool boundary_warning = false;  // |F(rho_max)| > 1e-6: enlarge rho_max
};

struct HSolve {
    Profile h;
    double b_star = 0.0;
    double rho_match = 0.0;
    double tail_mismatch = 0.0;
    bool boundary_warning = false;  // h(rho_max) < 1 - 1e-4 (beta > 0)
};

struct JSolve {
    Profile J;
    double c_star = 0.0;
};

/// Classify one F-trajectory: A1 if f' turns positive while f > -1, A2 if f
/// reaches -1 first, accept if the A3 conditions hold through the horizon.
ShootingOutcome classify_f(double a, const Profile& J, const Profile& h,
                           const ShootOptions& opt = {});

/// Classify one h-trajectory in H = rho*h form: B1 if H' turns negative, B2
/// if h blows past 1 + margin (or the guard) with H' > 0 throughout.
ShootingOutcome classify_h(double b, const Profile& F, double beta,
                           const ShootOptions& opt = {});

/// Shooting solve of the F-equation against frozen (J, h): geometric scan
/// for an A1/A2 bracket, bisection on a, then profile assembly with a
/// stable inward tail. Throws ShootingError when no bracket exists.
FSolve solve_f(const Profile& J, const Profile& h, const ShootOptions& opt = {});

/// Shooting solve of the h-equation against frozen F. beta > 0 bisects a
/// B1/B2 bracket; beta = 0 integrates once and rescales by the far-field
/// constant h + rho h' (the equation is linear in h).
HSolve solve_h(const Profile& F, double beta, const ShootOptions& opt = {});

/// Linear solve of the J-equation against frozen F: one integration with
/// trial c = 1, rescaled so J'(rho_max) = C. C = 0 returns J identically 0.
JSolve solve_j(const Profile& F, double bigC, const ShootOptions& opt = {});

}  // namespace dyonlab
