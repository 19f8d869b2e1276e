#pragma once

#include <utility>

#include "dyonlab/fixedpoint.hpp"

namespace dyonlab {

/// Magnetic and electric charges of a run, with the truncation budget of
/// the electric-charge comparison.
struct ChargeReport {
    double q_m_limit = 0.0;   // field-strength expression at rho_eval
    double q_m_exact = 0.0;   // 1/(2g)
    double q_e_flux = 0.0;
    double q_e_integral = 0.0;
    double rho_eval = 0.0;
    double tail_error_bound = 0.0;
};

/// (1/2g) / (h (1 - F^2) + h^3 F^2) at rho_eval; approaches 1/(2g).
double magnetic_charge(const DyonSolution& sol, double rho_eval);

/// Electric flux through the sphere at rho_eval over 4 pi:
/// (1/g) rho^2 h (J/rho)'.
double electric_charge_flux(const DyonSolution& sol, double rho_eval);

/// (1/g) integral of (2 F^2 J h / rho - h' J + rho h' J') with analytic
/// tail and origin corrections.
double electric_charge_integral(const DyonSolution& sol);

/// Radial electric and magnetic field profiles:
/// E_r = (h/g) d/drho (J/rho), B_r = 1 / (2 g rho^2 (h(1-F^2) + h^3 F^2)).
std::pair<Profile, Profile> field_profiles(const DyonSolution& sol);

ChargeReport charge_report(const DyonSolution& sol);

}  // namespace dyonlab
