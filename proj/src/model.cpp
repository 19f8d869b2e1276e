#include "dyonlab/model.hpp"

#include <cmath>

#include "dyonlab/grid.hpp"

namespace dyonlab {

void ModelParameters::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw ConfigError("beta must satisfy beta >= 0");
    if (!(bigC >= 0.0 && bigC < 1.0))
        throw ConfigError("C must satisfy 0 <= C < 1");
    if (!(g > 0.0) || !std::isfinite(g))
        throw ConfigError("g must satisfy g > 0");
    if (mode == RunMode::monopole && bigC != 0.0)
        throw ConfigError("monopole mode requires C = 0");
}

ModelParameters ModelParameters::dyon(double beta, double bigC, double g) {
    ModelParameters p;
    p.beta = beta;
    p.bigC = bigC;
    p.g = g;
    p.mode = RunMode::dyon;
    p.validate();
    return p;
}

ModelParameters ModelParameters::monopole(double beta, double g) {
    ModelParameters p;
    p.beta = beta;
    p.bigC = 0.0;
    p.g = g;
    p.mode = RunMode::monopole;
    p.validate();
    return p;
}

namespace {
inline void require_finite(double a, double b, double c, double d) {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) &&
          std::isfinite(d)))
        throw DomainError("model rhs: non-finite input");
}
}  // namespace

double f_rhs(double rho, double f, double J_at, double h_at) {
    require_finite(rho, f, J_at, h_at);
    if (!(rho > 0.0)) throw DomainError("f_rhs: rho must be > 0");
    const double inv_r2 = 1.0 / (rho * rho);
    return 2.0 * f * inv_r2 + h_at * h_at * (f + 1.0) +
           (f * f * (f + 3.0) - J_at * J_at * (f + 1.0)) * inv_r2;
}

double h_rhs_Hform(double rho, double H, double F_at, double beta) {
    require_finite(rho, H, F_at, beta);
    if (!(rho > 0.0)) throw DomainError("h_rhs_Hform: rho must be > 0");
    const double inv_r2 = 1.0 / (rho * rho);
    return 2.0 * F_at * F_at * H * inv_r2 +
           0.5 * beta * beta * H * (H * H * inv_r2 - 1.0);
}

double j_rhs(double rho, double J, double F_at) {
    require_finite(rho, J, F_at, 0.0);
    if (!(rho > 0.0)) throw DomainError("j_rhs: rho must be > 0");
    return 2.0 * J * F_at * F_at / (rho * rho);
}

namespace {

// centered 3-point first derivative of v at interior node i
inline double fd_center(const Eigen::ArrayXd& x, const Eigen::ArrayXd& v,
                        Eigen::Index i) {
    const double hm = x(i) - x(i - 1);
    const double hp = x(i + 1) - x(i);
    return (v(i + 1) * hm * hm - v(i - 1) * hp * hp +
            v(i) * (hp * hp - hm * hm)) /
           (hm * hp * (hm + hp));
}

}  // namespace

ResidualTriple residual(const ModelParameters& params, const Profile& F,
                        const Profile& h, const Profile& J) {
    if (F.grid != h.grid || F.grid != J.grid)
        throw ConfigError("residual: profiles must share one grid");
    const RadialGrid& g = *F.grid;
    if (g.size() < 3) throw ConfigError("residual: need at least 3 nodes");

    const bool monopole = params.mode == RunMode::monopole;
    const double b2 = params.beta * params.beta;
    ResidualTriple out;
    for (Eigen::Index i = 1; i + 1 < g.size(); ++i) {
        const double rho = g.nodes(i);
        const double r2 = rho * rho;
        const double Fv = F.values(i), hv = h.values(i), Jv = J.values(i);
        const double Fpp = fd_center(g.nodes, F.derivs, i);
        const double hpp = fd_center(g.nodes, h.derivs, i);
        const double rF = Fpp * r2 -
                          ((Fv * Fv - 1.0) * Fv - (Jv * Jv - r2 * hv * hv) * Fv);
        const double rh = hpp * r2 + 2.0 * h.derivs(i) * rho -
                          (2.0 * Fv * Fv * hv +
                           0.5 * b2 * hv * (hv * hv - 1.0) * r2);
        out.f_eq = std::max(out.f_eq, std::abs(rF));
        out.h_eq = std::max(out.h_eq, std::abs(rh));
        if (!monopole) {
            const double Jpp = fd_center(g.nodes, J.derivs, i);
            const double rJ = Jpp * r2 - 2.0 * Jv * Fv * Fv;
            out.j_eq = std::max(out.j_eq, std::abs(rJ));
        }
    }
    return out;
}

}  // namespace dyonlab
