#pragma once

#include <cmath>

#include "dyonlab/errors.hpp"

namespace dyonlab {

struct Profile;  // grid.hpp

enum class RunMode { dyon, monopole };

/// Physical configuration of a run: coupling beta = sqrt(2*lambda)/g,
/// asymptotic electric slope C (J/rho -> C), gauge coupling g, and the
/// derived decay scale nu = sqrt(1 - C^2).
struct ModelParameters {
    double beta = 1.0;
    double bigC = 0.0;
    double g = 1.0;
    RunMode mode = RunMode::dyon;

    double nu() const { return std::sqrt((1.0 - bigC) * (1.0 + bigC)); }

    void validate() const;

    static ModelParameters dyon(double beta, double bigC, double g = 1.0);
    static ModelParameters monopole(double beta, double g = 1.0);
};

/// Point on a trajectory: radius, function value, first derivative.
/// rho is strictly positive; the origin itself is only ever represented
/// through the series module.
struct StateVector {
    double rho = 0.0;
    double y = 0.0;
    double dy = 0.0;
};

// Right-hand sides of the three radial equations in the variables used for
// integration: f = F - 1, H = rho*h, and J itself. All have a regular
// singular point at rho = 0; callers start from the series module.

/// f'' = 2f/rho^2 + h^2 (f+1) + (f^3 + 3f^2 - J^2 (f+1)) / rho^2
double f_rhs(double rho, double f, double J_at, double h_at);

/// H'' = 2 F^2 H / rho^2 + (beta^2/2) H (H^2/rho^2 - 1)
double h_rhs_Hform(double rho, double H, double F_at, double beta);

/// J'' = 2 J F^2 / rho^2
double j_rhs(double rho, double J, double F_at);

struct ResidualTriple {
    double f_eq = 0.0;
    double h_eq = 0.0;
    double j_eq = 0.0;
    double max() const { return std::max(f_eq, std::max(h_eq, j_eq)); }
};

/// Max interior-node residual of each governing equation. Second derivatives
/// are formed by centered finite differences of the stored first-derivative
/// stream (differencing raw values instead runs into an ulp(J)*rho^2/drho^2
/// floor in the far field). Monopole mode reports j_eq = 0.
ResidualTriple residual(const ModelParameters& params, const Profile& F,
                        const Profile& h, const Profile& J);

}  // namespace dyonlab
