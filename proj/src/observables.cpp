#include "dyonlab/observables.hpp"

#include <cmath>

namespace dyonlab {

namespace {

double denom_at(const DyonSolution& sol, double rho) {
    const double F = sol.F.value_at(rho);
    const double h = sol.h.value_at(rho);
    return h * (1.0 - F * F) + h * h * h * F * F;
}

}  // namespace

double magnetic_charge(const DyonSolution& sol, double rho_eval) {
    const double D = denom_at(sol, rho_eval);
    if (!(D > 0.0))
        throw DomainError("magnetic_charge: nonpositive field-strength "
                          "denominator");
    return 1.0 / (2.0 * sol.params.g * D);
}

double electric_charge_flux(const DyonSolution& sol, double rho_eval) {
    const double h = sol.h.value_at(rho_eval);
    const double J = sol.J.value_at(rho_eval);
    const double dJ = sol.J.deriv_at(rho_eval);
    // rho^2 (J/rho)' = rho J' - J
    return h * (rho_eval * dJ - J) / sol.params.g;
}

double electric_charge_integral(const DyonSolution& sol) {
    const RadialGrid& g = *sol.F.grid;
    const Eigen::Index n = g.size();
    Eigen::ArrayXd integrand(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = g.nodes(i);
        const double F = sol.F.values(i), h = sol.h.values(i),
                     J = sol.J.values(i);
        const double dh = sol.h.derivs(i), dJ = sol.J.derivs(i);
        integrand(i) = 2.0 * F * F * J * h / rho - dh * J + rho * dh * dJ;
    }
    double q = quadrature(g, integrand);

    // origin correction: the integrand is 3 b c rho^2 + O(rho^4) below rho0
    const double rho0 = g.rho0();
    const double b_hat = sol.h.values(0) / rho0;
    const double c_hat = sol.J.values(0) / (rho0 * rho0);
    q += b_hat * c_hat * rho0 * rho0 * rho0;

    // tail correction from the decay models: with J ~ C rho - D out there,
    // -h'J + rho h'J' = h'(rho J' - J) -> h' D, and both the exponential
    // (beta > 0) and algebraic (beta = 0) h-tails give D (1 - h(rho_max));
    // the F^2 source adds C F(rho_max)^2 / nu.
    const double rho_max = g.rho_max();
    const double C = sol.params.bigC;
    const double D = C * rho_max - sol.J.values(n - 1);
    const double hm = sol.h.values(n - 1);
    const double Fm = sol.F.values(n - 1);
    const double nu = sol.params.nu();
    q += D * (1.0 - hm) + C * Fm * Fm / nu;

    return q / sol.params.g;
}

std::pair<Profile, Profile> field_profiles(const DyonSolution& sol) {
    const RadialGrid& g = *sol.F.grid;
    const Eigen::Index n = g.size();
    const double gc = sol.params.g;
    Eigen::ArrayXd E(n), dE(n), B(n), dB(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rho = g.nodes(i);
        const double F = sol.F.values(i), h = sol.h.values(i),
                     J = sol.J.values(i);
        const double dF = sol.F.derivs(i), dh = sol.h.derivs(i),
                     dJ = sol.J.derivs(i);
        const double r2 = rho * rho;
        const double ddJ = 2.0 * J * F * F / r2;  // from the J equation
        E(i) = h * (rho * dJ - J) / (gc * r2);
        dE(i) = dh * (rho * dJ - J) / (gc * r2) + h * (rho * ddJ) / (gc * r2) -
                2.0 * h * (rho * dJ - J) / (gc * r2 * rho);
        const double den = h * (1.0 - F * F) + h * h * h * F * F;
        const double dden = dh * (1.0 - F * F) - 2.0 * h * F * dF +
                            3.0 * h * h * dh * F * F +
                            2.0 * h * h * h * F * dF;
        B(i) = 1.0 / (2.0 * gc * r2 * den);
        dB(i) = -B(i) * (2.0 / rho + dden / den);
    }
    return {Profile(sol.F.grid, std::move(E), std::move(dE)),
            Profile(sol.F.grid, std::move(B), std::move(dB))};
}

ChargeReport charge_report(const DyonSolution& sol) {
    const RadialGrid& g = *sol.F.grid;
    const Eigen::Index n = g.size();
    ChargeReport r;
    r.rho_eval = g.rho_max();
    r.q_m_exact = 1.0 / (2.0 * sol.params.g);
    r.q_m_limit = magnetic_charge(sol, r.rho_eval);
    r.q_e_flux = electric_charge_flux(sol, r.rho_eval);
    r.q_e_integral = electric_charge_integral(sol);

    const double C = sol.params.bigC;
    const double D = C * r.rho_eval - sol.J.values(n - 1);
    const double hm = sol.h.values(n - 1);
    const double Fm = sol.F.values(n - 1);
    r.tail_error_bound = 10.0 * (std::abs(D * (1.0 - hm)) +
                                 std::abs(C) * Fm * Fm / sol.params.nu() +
                                 1.0e-8 * std::abs(r.q_e_flux)) +
                         1.0e-7;
    return r;
}

}  // namespace dyonlab
