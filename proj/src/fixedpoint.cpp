#include "dyonlab/fixedpoint.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dyonlab/observables.hpp"
#include "dyonlab/verify.hpp"

namespace dyonlab {

double weighted_norm(const RadialGrid& grid, const Eigen::ArrayXd& J_vals,
                     const Eigen::ArrayXd& h_vals, double k) {
    if (!(k > 0.0 && k < 1.0))
        throw ConfigError("weighted_norm: requires 0 < k < 1");
    if (J_vals.size() != grid.size() || h_vals.size() != grid.size())
        throw ConfigError("weighted_norm: length mismatch");
    double sup = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double rho = grid.nodes(i);
        const double rk = std::pow(rho, k);
        const double wj = (1.0 + rk) / (rho * rk);  // rho^{-1-k}(1+rho^k)
        const double wh = (1.0 + rk) / rk;          // rho^{-k}(1+rho^k)
        sup = std::max(sup, wj * std::abs(J_vals(i)) + wh * std::abs(h_vals(i)));
    }
    return sup;
}

double weighted_norm(const Profile& J, const Profile& h, double k) {
    if (J.grid != h.grid) throw ConfigError("weighted_norm: grid mismatch");
    return weighted_norm(*J.grid, J.values, h.values, k);
}

IterationState default_seed(const ModelParameters& params,
                            std::shared_ptr<const RadialGrid> grid) {
    const double C = params.bigC;
    IterationState st;
    st.h = profile_from_fn(
        grid, [](double r) { return std::tanh(r); },
        [](double r) {
            const double c = std::cosh(r);
            return 1.0 / (c * c);
        });
    st.J = profile_from_fn(
        grid, [C](double r) { return C * r * std::tanh(r); },
        [C](double r) {
            const double c = std::cosh(r);
            return C * (std::tanh(r) + r / (c * c));
        });
    return st;
}

namespace {

Profile relax_profiles(const Profile& old_p, const Profile& new_p,
                       double omega) {
    return Profile(old_p.grid,
                   (1.0 - omega) * old_p.values + omega * new_p.values,
                   (1.0 - omega) * old_p.derivs + omega * new_p.derivs);
}

}  // namespace

IterationState apply_T(const IterationState& state,
                       const ModelParameters& params,
                       const SolveOptions& opts) {
    ShootOptions so;
    so.ode_tol = opts.ode_tol;
    so.bisect_tol = opts.bisect_tol;

    FSolve fs = solve_f(state.J, state.h, so);
    HSolve hs = solve_h(fs.F, params.beta, so);
    JSolve js = solve_j(fs.F, params.mode == RunMode::monopole ? 0.0
                                                               : params.bigC,
                        so);

    IterationState out;
    out.F = std::move(fs.F);
    out.h = std::move(hs.h);
    out.J = std::move(js.J);
    out.iter = state.iter + 1;
    out.a_star = fs.a_star;
    out.b_star = hs.b_star;
    out.c_star = js.c_star;
    out.delta_norm =
        weighted_norm(*state.J.grid, out.J.values - state.J.values,
                      out.h.values - state.h.values, opts.k_exponent);
    out.history = state.history;
    out.history.push_back({out.iter, out.delta_norm, out.a_star, out.b_star,
                           out.c_star});
    return out;
}

DyonSolution solve_dyon(const ModelParameters& params, const SolveOptions& opts,
                        const IterationState* seed) {
    params.validate();
    const double nu = params.nu();
    const double rho_max = opts.rho_max > 0.0 ? opts.rho_max : 25.0 / nu;
    std::shared_ptr<const RadialGrid> grid;
    if (opts.n_geo > 0 && opts.n_uni > 0)
        grid = make_shared_grid(
            make_grid(opts.rho0, rho_max, opts.n_geo, opts.n_uni));
    else
        grid = make_shared_grid(default_grid(opts.rho0, rho_max, opts.du_target));

    IterationState st;
    if (seed) {
        if (seed->J.grid->size() == grid->size() &&
            (seed->J.grid->nodes == grid->nodes).all()) {
            st = *seed;
        } else {  // resample a seed given on another grid
            const Profile& sj = seed->J;
            const Profile& sh = seed->h;
            auto clampq = [&](const Profile& p, double rho, bool deriv) {
                const double r =
                    std::clamp(rho, p.rho0(), p.rho_max());
                return deriv ? p.deriv_at(r) : p.value_at(r);
            };
            st.J = profile_from_fn(
                grid, [&](double r) { return clampq(sj, r, false); },
                [&](double r) { return clampq(sj, r, true); });
            st.h = profile_from_fn(
                grid, [&](double r) { return clampq(sh, r, false); },
                [&](double r) { return clampq(sh, r, true); });
        }
    } else {
        st = default_seed(params, grid);
    }

    IterationState t_out;
    bool converged = false;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        t_out = apply_T(st, params, opts);
        if (t_out.delta_norm < opts.fp_tol) {
            converged = true;
            break;
        }
        st.J = relax_profiles(st.J, t_out.J, opts.relax);
        st.h = relax_profiles(st.h, t_out.h, opts.relax);
        st.F = t_out.F;
        st.iter = t_out.iter;
        st.history = t_out.history;
    }
    if (!converged) {
        std::ostringstream os;
        os << "solve_dyon: no fixed point within " << opts.max_sweeps
           << " sweeps (fp_tol " << opts.fp_tol << "); delta_norm history:";
        for (const auto& s : t_out.history) os << " " << s.delta_norm;
        throw ConvergenceError(os.str());
    }

    DyonSolution sol;
    sol.params = params;
    sol.F = std::move(*t_out.F);
    sol.h = std::move(t_out.h);
    sol.J = std::move(t_out.J);
    sol.a_star = t_out.a_star;
    sol.b_star = t_out.b_star;
    sol.c_star = t_out.c_star;
    sol.iterations = t_out.iter;
    sol.history = std::move(t_out.history);
    sol.residuals = residual(params, sol.F, sol.h, sol.J);
    sol.residual_warning = sol.residuals.max() > opts.residual_acceptance;

    const Eigen::Index n = grid->size();
    const bool dyon = params.mode == RunMode::dyon && params.bigC > 0.0;
    sol.boundary_warning =
        std::abs(sol.F.values(n - 1)) > 1.0e-4 ||
        std::abs(sol.h.values(n - 1) +
                 grid->rho_max() * sol.h.derivs(n - 1) - 1.0) > 1.0e-4 ||
        (dyon && std::abs(sol.J.derivs(n - 1) - params.bigC) > 1.0e-4);

    sol.q_m = magnetic_charge(sol, grid->rho_max());
    sol.q_e = electric_charge_flux(sol, grid->rho_max());

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto safe_fit = [&](DecayTarget t) {
        try {
            return fit_decay(sol, t);
        } catch (const Error&) {
            return nan;
        }
    };
    sol.rate_F = safe_fit(DecayTarget::F);
    sol.rate_h = params.beta > 0.0 ? safe_fit(DecayTarget::one_minus_h) : nan;
    sol.rate_Jpp = dyon ? safe_fit(DecayTarget::Jpp) : nan;
    return sol;
}

double tail_value(Component c, const DyonSolution& sol, double rho) {
    const double rho_max = sol.F.rho_max();
    if (rho < rho_max)
        throw DomainError("tail_value: rho must be >= rho_max");
    const Eigen::Index n = sol.F.values.size();
    const double nu = sol.params.nu();
    switch (c) {
        case Component::F:
            return sol.F.values(n - 1) * std::exp(-nu * (rho - rho_max));
        case Component::h: {
            const double A = 1.0 - sol.h.values(n - 1);
            if (sol.params.beta > 0.0) {
                const double kappa = std::min(sol.params.beta, 2.0 * nu);
                return 1.0 - A * std::exp(-kappa * (rho - rho_max));
            }
            return 1.0 - A * rho_max / rho;
        }
        case Component::J: {
            const double D =
                sol.params.bigC * rho_max - sol.J.values(n - 1);
            return sol.params.bigC * rho - D;
        }
    }
    throw DomainError("tail_value: unknown component");
}

}  // namespace dyonlab
