#pragma once

#include <optional>
#include <vector>

#include "dyonlab/model.hpp"
#include "dyonlab/shoot.hpp"

namespace dyonlab {

struct SolveOptions {
    double fp_tol = 1.0e-8;    // weighted-norm change between sweeps
    int max_sweeps = 50;
    double relax = 0.7;        // under-relaxation weight on (J, h)
    double ode_tol = 1.0e-10;
    double bisect_tol = 1.0e-15;
    double residual_acceptance = 1.0e-6;
    double k_exponent = 0.5;   // weight exponent of the fixed-point norm
    double rho0 = 1.0e-4;
    double rho_max = 0.0;      // 0: defaults to 25 / nu
    double du_target = 1.6e-3;
    int n_geo = 0, n_uni = 0;  // explicit grid override when both nonzero
};

/// The pair (J, h) walking toward the fixed point of T, with the F produced
/// on the latest sweep and the convergence history.
struct IterationState {
    Profile J, h;
    std::optional<Profile> F;
    int iter = 0;
    double delta_norm = 0.0;
    double a_star = 0.0, b_star = 0.0, c_star = 0.0;

    struct Sweep {
        int iter;
        double delta_norm;
        double a_star, b_star, c_star;
    };
    std::vector<Sweep> history;
};

/// Converged dyon (or monopole) solution with shooting constants,
/// residuals, charges and decay fits.
struct DyonSolution {
    ModelParameters params;
    Profile F, h, J;
    double a_star = 0.0, b_star = 0.0, c_star = 0.0;
    ResidualTriple residuals;
    double q_m = 0.0, q_e = 0.0;
    double rate_F = 0.0, rate_h = 0.0, rate_Jpp = 0.0;  // NaN when skipped
    int iterations = 0;
    bool residual_warning = false;
    bool boundary_warning = false;
    std::vector<IterationState::Sweep> history;
};

/// Weighted fixed-point norm: sup over grid nodes of
/// rho^{-1-k}(1+rho^k)|J| + rho^{-k}(1+rho^k)|h|.
double weighted_norm(const RadialGrid& grid, const Eigen::ArrayXd& J_vals,
                     const Eigen::ArrayXd& h_vals, double k = 0.5);
double weighted_norm(const Profile& J, const Profile& h, double k = 0.5);

/// Default outer-iteration seed: h = tanh(rho), J = C rho tanh(rho).
IterationState default_seed(const ModelParameters& params,
                            std::shared_ptr<const RadialGrid> grid);

/// One sweep of the operator T: solve_f(J, h) -> F, then solve_h(F) and
/// solve_j(F). delta_norm is the weighted-norm distance between the output
/// pair and the input pair.
IterationState apply_T(const IterationState& state,
                       const ModelParameters& params,
                       const SolveOptions& opts = {});

/// Outer fixed-point iteration with under-relaxation. Throws
/// ConvergenceError (with the sweep history in the message) when delta_norm
/// fails to reach fp_tol within max_sweeps.
DyonSolution solve_dyon(const ModelParameters& params,
                        const SolveOptions& opts = {},
                        const IterationState* seed = nullptr);

enum class Component { F, h, J };

/// Asymptotic continuation beyond rho_max, matched at rho_max:
/// F: F(rho_max) e^{-nu (rho - rho_max)};
/// h: 1 - (1 - h(rho_max)) e^{-min(beta, 2 nu)(rho - rho_max)} for beta > 0,
///    1 - A/rho for beta = 0; J: C rho - D.
double tail_value(Component c, const DyonSolution& sol, double rho);

}  // namespace dyonlab
