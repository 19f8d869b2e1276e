#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "dyonlab/grid.hpp"

namespace dyonlab {

/// Evaluates a frozen profile anywhere in (0, rho_max]: interpolation on the
/// grid, leading-order origin law below rho0 (h ~ b rho, J ~ c rho^2,
/// F ~ 1 + a rho^2 with coefficients fitted at the innermost node).
struct FrozenField {
    enum class Law { zero, linear, quadratic, one_plus_quadratic };

    const Profile* profile = nullptr;  // not owned; may be null for Law::zero
    Law law = Law::zero;
    double coef = 0.0;
    double rho0 = 0.0;

    double operator()(double rho) const;

    static FrozenField zero();
    static FrozenField higgs(const Profile& h);     // h ~ coef * rho
    static FrozenField electric(const Profile& J);  // J ~ coef * rho^2
    static FrozenField gauge(const Profile& F);     // F ~ 1 + coef * rho^2
};

/// Radius policy below which the Picard iteration is safely contractive:
/// min(0.05, 0.5 / sqrt(1 + |leading|)).
double series_delta(double leading);

struct SeriesDiag {
    int sweeps = 0;
    std::vector<double> deltas;  // sup-norm change per sweep
};

// Local solutions near the singular origin, solved by Picard iteration on
// the integral forms of the shifted equations. Each returns (value,
// derivative) at rho_eval and converges to 1e-12 in sup norm; failure to
// converge within 50 sweeps raises SeriesError (rho_eval too large).

/// f = F - 1 with f = a rho^2 + O(rho^{2k+2}); requires a <= 0.
std::pair<double, double> f_series(double a, const FrozenField& J,
                                   const FrozenField& h, double rho_eval,
                                   SeriesDiag* diag = nullptr);

/// H = rho*h with H = b rho^2 + O(rho^3); requires b >= 0.
std::pair<double, double> h_series(double b, const FrozenField& F, double beta,
                                   double rho_eval, SeriesDiag* diag = nullptr);

/// J with J = c rho^2 + O(rho^4); requires c >= 0.
std::pair<double, double> j_series(double c, const FrozenField& F,
                                   double rho_eval, SeriesDiag* diag = nullptr);

// Profile-taking convenience overloads.
std::pair<double, double> f_series(double a, const Profile& J, const Profile& h,
                                   double rho_eval);
std::pair<double, double> h_series(double b, const Profile& F, double beta,
                                   double rho_eval);
std::pair<double, double> j_series(double c, const Profile& F, double rho_eval);

/// Origin-local solution with its shooting parameter and validity radius.
struct OriginExpansion {
    enum class Kind { F_type, H_type, J_type };
    Kind kind = Kind::F_type;
    double leading = 0.0;
    double valid_to = 0.0;
    std::function<std::pair<double, double>(double)> evaluator;
};

OriginExpansion make_f_expansion(double a, Profile J, Profile h);
OriginExpansion make_h_expansion(double b, Profile F, double beta);
OriginExpansion make_j_expansion(double c, Profile F);

}  // namespace dyonlab
