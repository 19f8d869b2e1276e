// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code = number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyonlab/fixedpoint.hpp"
#include "dyonlab/observables.hpp"
#include "dyonlab/shoot.hpp"
#include "dyonlab/verify.hpp"

using namespace dyonlab;
using clock_type = std::chrono::steady_clock;

namespace {

struct TimedSolution {
    DyonSolution sol;
    double wall_s = 0.0;
};

TimedSolution timed_solve(const ModelParameters& p, const SolveOptions& o,
                          const IterationState* seed = nullptr) {
    const auto t0 = clock_type::now();
    TimedSolution out;
    out.sol = solve_dyon(p, o, seed);
    out.wall_s = std::chrono::duration<double>(clock_type::now() - t0).count();
    return out;
}

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %s  (%s)\n", pass ? "PASS" : "FAIL", id,
                name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double sup_distance_to_oracle(const DyonSolution& sol, double window_max) {
    const OracleSolution o = bps_oracle(sol.params.bigC);
    const RadialGrid& g = *sol.F.grid;
    double sup = 0.0;
    for (Eigen::Index i = 0; i < g.size() && g.nodes(i) <= window_max; ++i) {
        const double rho = g.nodes(i);
        sup = std::max(sup, std::abs(sol.F.values(i) - o.F(rho)));
        sup = std::max(sup, std::abs(sol.h.values(i) - o.h(rho)));
        sup = std::max(sup, std::abs(sol.J.values(i) - o.J(rho)));
    }
    return sup;
}

}  // namespace

int main() {
    const std::vector<double> betas{0.5, 1.0, 2.0};
    const std::vector<double> cs{0.0, 0.3, 0.6};

    // criterion 1 runs first on an otherwise idle process so its wall time
    // is meaningful
    std::optional<TimedSolution> bps00;
    try {
        bps00 = timed_solve(ModelParameters::dyon(0.0, 0.0), {});
    } catch (const Error& e) {
        std::printf("solve (beta=0, C=0) failed: %s\n", e.what());
    }

    {
        bool pass = false;
        std::string detail = "solve failed";
        if (bps00) {
            const double sup = sup_distance_to_oracle(bps00->sol, 15.0);
            const double da = std::abs(bps00->sol.a_star + 1.0 / 6.0);
            const double db = std::abs(bps00->sol.b_star - 1.0 / 3.0);
            pass = sup <= 1e-4 && da <= 1e-4 && db <= 1e-4 &&
                   bps00->wall_s <= 10.0;
            detail = fmt("sup %.2e <= 1e-4, |a*+1/6| %.2e, |b*-1/3| %.2e, "
                         "%.1f s <= 10 s",
                         sup, da, db, bps00->wall_s);
        }
        report(1, "BPS monopole oracle", pass, detail);
    }

    // solve the (beta, C) matrix once; criteria 3, 4, 5, 6, 7 share it
    std::map<std::pair<double, double>, TimedSolution> runs;
    for (double b : betas)
        for (double c : cs) {
            try {
                runs[{b, c}] = timed_solve(ModelParameters::dyon(b, c), {});
            } catch (const Error& e) {
                std::printf("solve (beta=%g, C=%g) failed: %s\n", b, c,
                            e.what());
            }
        }

    // beta = 0 points approach h -> 1 only algebraically (1 - h ~ 1/(nu rho));
    // the field-strength limit and the flux need rho_max ~ 1500/nu to sit
    // within 1e-3 of their limits
    std::map<double, TimedSolution> giants;
    for (double c : cs) {
        try {
            ModelParameters p = ModelParameters::dyon(0.0, c);
            SolveOptions o;
            o.rho_max = 1500.0 / p.nu();
            o.du_target = 0.01;
            o.residual_acceptance = 1e-4;
            giants[c] = timed_solve(p, o);
        } catch (const Error& e) {
            std::printf("giant solve (beta=0, C=%g) failed: %s\n", c, e.what());
        }
    }

    {
        bool pass = false;
        std::string detail = "solve failed";
        if (giants.count(0.6)) {
            const DyonSolution& sol = giants[0.6].sol;
            const double sup = sup_distance_to_oracle(sol, sol.F.rho_max());
            const double dc = std::abs(sol.c_star - 0.16);
            const double flux =
                electric_charge_flux(sol, sol.F.rho_max());
            const double integral = electric_charge_integral(sol);
            pass = sup <= 1e-4 && dc <= 1e-4 && std::abs(flux - 0.75) <= 1e-3 &&
                   std::abs(integral - 0.75) <= 1e-3;
            detail = fmt("sup %.2e, |c*-0.16| %.2e, q_e flux %.6f / integral "
                         "%.6f vs 0.75 +- 1e-3",
                         sup, dc, flux, integral);
        }
        report(2, "BPS dyon oracle", pass, detail);
    }

    {
        // the profile equations do not involve g, so each converged run is
        // evaluated at all three couplings
        bool pass = true;
        double worst = 0.0;
        int points = 0;
        auto check_qm = [&](const DyonSolution& sol) {
            for (double gg : {0.5, 1.0, 2.0}) {
                DyonSolution s = sol;
                s.params.g = gg;
                const double dev = std::abs(magnetic_charge(s, s.F.rho_max()) -
                                            1.0 / (2.0 * gg));
                worst = std::max(worst, dev);
            }
            ++points;
        };
        for (double b : betas)
            for (double c : cs) {
                if (!runs.count({b, c})) {
                    pass = false;
                    continue;
                }
                check_qm(runs[{b, c}].sol);
            }
        for (double c : cs) {
            if (!giants.count(c)) {
                pass = false;
                continue;
            }
            check_qm(giants[c].sol);
        }
        pass = pass && worst <= 1e-3;
        report(3, "magnetic charge 1/(2g)", pass,
               fmt("%d converged points, worst |q_m - 1/(2g)| = %.2e <= 1e-3",
                   points, worst));
    }

    {
        bool pass = true;
        std::string detail;
        double worst_time = 0.0;
        for (double b : betas)
            for (double c : cs) {
                if (!runs.count({b, c})) {
                    pass = false;
                    detail += fmt(" (%g,%g): no solve;", b, c);
                    continue;
                }
                const TimedSolution& ts = runs[{b, c}];
                worst_time = std::max(worst_time, ts.wall_s);
                const PropertyReport rep = check_theorem(ts.sol);
                if (!rep.overall) {
                    pass = false;
                    for (const auto& ck : rep.checks)
                        if (!ck.pass && !ck.informational)
                            detail += fmt(" (%g,%g): %s;", b, c,
                                          ck.name.c_str());
                }
                if (ts.wall_s > 60.0) {
                    pass = false;
                    detail += fmt(" (%g,%g): %.0f s > 60 s;", b, c, ts.wall_s);
                }
            }
        if (detail.empty())
            detail = fmt("all 9 points pass; slowest point %.1f s <= 60 s",
                         worst_time);
        report(4, "qualitative property suite over beta x C", pass, detail);
    }

    {
        bool pass = true;
        std::string detail;
        double worstF = 0.0, worstJ = 0.0, worstH = 0.0;
        for (double b : betas)
            for (double c : cs) {
                if (!runs.count({b, c})) {
                    pass = false;
                    continue;
                }
                const DyonSolution& sol = runs[{b, c}].sol;
                const double nu = sol.params.nu();
                const double devF = std::abs(sol.rate_F / nu - 1.0);
                worstF = std::max(worstF, devF);
                if (devF > 0.10) {
                    pass = false;
                    detail += fmt(" F-rate (%g,%g) %.3f;", b, c, sol.rate_F);
                }
                if (c > 0.0) {
                    const double devJ =
                        std::abs(sol.rate_Jpp / (2.0 * nu) - 1.0);
                    worstJ = std::max(worstJ, devJ);
                    if (devJ > 0.15) {
                        pass = false;
                        detail += fmt(" J''-rate (%g,%g) %.3f;", b, c,
                                      sol.rate_Jpp);
                    }
                }
                if (b == 0.5 || b == 1.0) {
                    const double expect = std::min(b, 2.0 * nu);
                    const double devH = std::abs(sol.rate_h / expect - 1.0);
                    worstH = std::max(worstH, devH);
                    if (devH > 0.15) {
                        pass = false;
                        detail += fmt(" h-rate (%g,%g) %.3f;", b, c,
                                      sol.rate_h);
                    }
                }
            }
        if (detail.empty())
            detail = fmt("worst rel. dev: F %.3f <= 0.10, J'' %.3f <= 0.15, "
                         "1-h %.3f <= 0.15",
                         worstF, worstJ, worstH);
        report(5, "decay rates", pass, detail);
    }

    {
        bool pass = false;
        std::string detail = "monopole run unavailable";
        try {
            auto grid = make_shared_grid(default_grid(1e-4, 25.0));
            const Eigen::Index n = grid->size();
            const Profile J0(grid, Eigen::ArrayXd::Zero(n),
                             Eigen::ArrayXd::Zero(n));
            const Profile ht = profile_from_fn(
                grid, [](double r) { return std::tanh(r); },
                [](double r) {
                    const double ch = std::cosh(r);
                    return 1.0 / (ch * ch);
                });
            const ShotTag small_a = classify_f(-1e-6, J0, ht).tag;
            const ShotTag large_a = classify_f(-100.0, J0, ht).tag;
            bool ok_f = small_a == ShotTag::A1 && large_a == ShotTag::A2;
            bool ok_h = false;
            if (runs.count({1.0, 0.0})) {
                const Profile& F = runs[{1.0, 0.0}].sol.F;
                ok_h = classify_h(1e-8, F, 1.0).tag == ShotTag::B1 &&
                       classify_h(1e3, F, 1.0).tag == ShotTag::B2;
            }
            pass = ok_f && ok_h;
            detail = fmt("a=-1e-6 -> %s, a=-100 -> %s, b=1e-8 -> %s, "
                         "b=1e3 -> %s",
                         small_a == ShotTag::A1 ? "A1" : "not A1",
                         large_a == ShotTag::A2 ? "A2" : "not A2",
                         ok_h ? "B1" : "not B1", ok_h ? "B2" : "not B2");
        } catch (const Error& e) {
            detail = e.what();
        }
        report(6, "shooting-set population", pass, detail);
    }

    {
        bool pass = false;
        std::string detail = "runs unavailable";
        if (runs.count({1.0, 0.3})) {
            try {
                const DyonSolution& a = runs[{1.0, 0.3}].sol;
                auto grid = a.F.grid;
                IterationState alt;
                alt.h = profile_from_fn(
                    grid, [](double r) { return r / (1.0 + r); },
                    [](double r) { return 1.0 / ((1.0 + r) * (1.0 + r)); });
                alt.J = profile_from_fn(
                    grid, [](double r) { return 0.3 * r * r / (1.0 + r); },
                    [](double r) {
                        return 0.3 * r * (2.0 + r) / ((1.0 + r) * (1.0 + r));
                    });
                const TimedSolution b =
                    timed_solve(ModelParameters::dyon(1.0, 0.3), {}, &alt);
                const double dist =
                    weighted_norm(*grid, a.J.values - b.sol.J.values,
                                  a.h.values - b.sol.h.values, 0.5);
                pass = dist <= 1e-6 && a.iterations <= 50 &&
                       b.sol.iterations <= 50;
                detail = fmt("seed distance %.2e <= 1e-6; sweeps %d and %d "
                             "<= 50",
                             dist, a.iterations, b.sol.iterations);
            } catch (const Error& e) {
                detail = e.what();
            }
        }
        report(7, "seed independence", pass, detail);
    }

    {
        // run the criterion-1 configuration at a coarse grid pair with the
        // iteration tolerances tightened, so the discretization term
        // dominates the comparison (at the default density the oracle error
        // sits at the 1e-8 iteration floor)
        bool pass = false;
        std::string detail;
        try {
            auto run_at = [&](double du) {
                SolveOptions o;
                o.du_target = du;
                o.fp_tol = 1e-10;
                o.residual_acceptance = 1e-2;
                return solve_dyon(ModelParameters::dyon(0.0, 0.0), o);
            };
            const DyonSolution coarse = run_at(0.04);
            const DyonSolution fine = run_at(0.02);
            const double e1 = sup_distance_to_oracle(coarse, 15.0);
            const double e2 = sup_distance_to_oracle(fine, 15.0);
            pass = e1 >= 3.0 * e2 && e1 <= 1e-4;
            detail = fmt("error %.2e -> %.2e on doubling (ratio %.1f >= 3)",
                         e1, e2, e1 / std::max(e2, 1e-300));
        } catch (const Error& e) {
            detail = e.what();
        }
        report(8, "discretization convergence", pass, detail);
    }

    std::printf("%d of 8 criteria passed\n", 8 - g_failures);
    return g_failures;
}
