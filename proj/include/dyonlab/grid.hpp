#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "dyonlab/errors.hpp"

namespace dyonlab {

/// Composite radial grid: geometric nodes on [rho0, 1), uniform nodes on
/// [1, rho_max], with quadrature weights from a piecewise-parabolic rule.
struct RadialGrid {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;
    int n_geo = 0;  // nodes in the geometric section (0 for raw-node grids)
    int n_uni = 0;  // nodes in the uniform section

    Eigen::Index size() const { return nodes.size(); }
    double rho0() const { return nodes(0); }
    double rho_max() const { return nodes(nodes.size() - 1); }

    /// Index of the last node <= rho (clamped to [0, size-2]).
    Eigen::Index locate(double rho) const;
};

/// n_geo geometric nodes covering [rho0, 1) plus n_uni uniform nodes
/// covering [1, rho_max]. Requires 0 < rho0 < 1 < rho_max and
/// n_geo, n_uni >= 8.
RadialGrid make_grid(double rho0, double rho_max, int n_geo, int n_uni);

/// Grid from an arbitrary strictly increasing node set (CSV ingestion).
RadialGrid grid_from_nodes(Eigen::ArrayXd nodes);

/// Default grid for a solve: the uniform spacing is matched to the last
/// geometric step so the centered difference stencils never straddle a
/// spacing jump. du_target ~ 1.6e-3 keeps the discrete residuals below the
/// default 1e-6 acceptance.
RadialGrid default_grid(double rho0, double rho_max, double du_target = 1.6e-3);

std::shared_ptr<const RadialGrid> make_shared_grid(RadialGrid g);

/// One scalar function of rho with values and first derivatives at every
/// node. Interpolation is cubic Hermite with the stored derivatives clamped
/// to the Fritsch-Carlson monotone box, so monotone data stays monotone and
/// data in [0,1] never overshoots.
struct Profile {
    std::shared_ptr<const RadialGrid> grid;
    Eigen::ArrayXd values;
    Eigen::ArrayXd derivs;

    Profile() = default;
    Profile(std::shared_ptr<const RadialGrid> g, Eigen::ArrayXd vals,
            Eigen::ArrayXd ders);

    double operator()(double rho) const { return value_at(rho); }
    double value_at(double rho) const;
    double deriv_at(double rho) const;

    double rho0() const { return grid->rho0(); }
    double rho_max() const { return grid->rho_max(); }

  private:
    Eigen::ArrayXd slopes_;  // clamped interpolation slopes
};

/// Shape-preserving interpolation of a frozen profile. Exact at nodes;
/// queries outside [rho0, rho_max] raise DomainError (tail queries go
/// through the decay models in the fixedpoint module).
double interpolate(const Profile& p, double rho);

/// Composite quadrature of samples given on the grid (weights dot samples).
double quadrature(const RadialGrid& grid, const Eigen::ArrayXd& samples);

/// Sample analytic value/derivative functions onto a grid.
Profile profile_from_fn(std::shared_ptr<const RadialGrid> g,
                        const std::function<double(double)>& value,
                        const std::function<double(double)>& deriv);

}  // namespace dyonlab
