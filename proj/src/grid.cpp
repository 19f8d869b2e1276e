#include "dyonlab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace dyonlab {

namespace {

// Quadrature weights for a parabola through three consecutive nodes,
// integrated over both intervals (the non-uniform Simpson pair rule).
void add_pair_weights(const Eigen::ArrayXd& x, Eigen::Index i,
                      Eigen::ArrayXd& w) {
    const double h0 = x(i + 1) - x(i);
    const double h1 = x(i + 2) - x(i + 1);
    const double H = h0 + h1;
    w(i) += H * (2.0 * h0 - h1) / (6.0 * h0);
    w(i + 1) += H * H * H / (6.0 * h0 * h1);
    w(i + 2) += H * (2.0 * h1 - h0) / (6.0 * h1);
}

// Integral of the parabola through (x[i], x[i+1], x[i+2]) over the last
// interval only; used when a section has an odd interval count.
void add_tail_weights(const Eigen::ArrayXd& x, Eigen::Index i,
                      Eigen::ArrayXd& w) {
    const double h0 = x(i + 1) - x(i);
    const double h1 = x(i + 2) - x(i + 1);
    w(i) += -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    w(i + 1) += h1 * (h1 + 3.0 * h0) / (6.0 * h0);
    w(i + 2) += h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
}

// Weights over one contiguous node range [lo, hi] (inclusive).
void section_weights(const Eigen::ArrayXd& x, Eigen::Index lo, Eigen::Index hi,
                     Eigen::ArrayXd& w) {
    const Eigen::Index n = hi - lo;  // interval count
    if (n == 1) {  // single interval: trapezoid
        const double h = x(lo + 1) - x(lo);
        w(lo) += 0.5 * h;
        w(lo + 1) += 0.5 * h;
        return;
    }
    Eigen::Index i = lo;
    while (i + 2 <= hi) {
        add_pair_weights(x, i, w);
        i += 2;
    }
    if (i < hi) add_tail_weights(x, hi - 2, w);
}

}  // namespace

Eigen::Index RadialGrid::locate(double rho) const {
    const double* begin = nodes.data();
    const double* end = begin + nodes.size();
    const double* it = std::upper_bound(begin, end, rho);
    Eigen::Index i = static_cast<Eigen::Index>(it - begin) - 1;
    return std::clamp<Eigen::Index>(i, 0, nodes.size() - 2);
}

RadialGrid make_grid(double rho0, double rho_max, int n_geo, int n_uni) {
    if (!(rho0 > 0.0 && rho0 < 1.0 && rho_max > 1.0))
        throw ConfigError("make_grid: need 0 < rho0 < 1 < rho_max");
    if (n_geo < 8 || n_uni < 8)
        throw ConfigError("make_grid: need n_geo, n_uni >= 8");

    RadialGrid g;
    g.n_geo = n_geo;
    g.n_uni = n_uni;
    g.nodes.resize(n_geo + n_uni);
    const double ratio = std::pow(1.0 / rho0, 1.0 / n_geo);
    double v = rho0;
    for (int i = 0; i < n_geo; ++i) {
        g.nodes(i) = v;
        v *= ratio;
    }
    const double du = (rho_max - 1.0) / (n_uni - 1);
    for (int j = 0; j < n_uni; ++j) g.nodes(n_geo + j) = 1.0 + j * du;
    g.nodes(n_geo + n_uni - 1) = rho_max;  // exact endpoint

    g.weights = Eigen::ArrayXd::Zero(g.nodes.size());
    // geometric section spans nodes [0, n_geo] (node n_geo is 1.0)
    section_weights(g.nodes, 0, n_geo, g.weights);
    section_weights(g.nodes, n_geo, g.nodes.size() - 1, g.weights);
    return g;
}

RadialGrid grid_from_nodes(Eigen::ArrayXd nodes) {
    if (nodes.size() < 3) throw ConfigError("grid_from_nodes: need >= 3 nodes");
    for (Eigen::Index i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes(i) < nodes(i + 1)))
            throw ConfigError("grid_from_nodes: nodes must increase strictly");
    if (!(nodes(0) > 0.0)) throw ConfigError("grid_from_nodes: rho must be > 0");
    RadialGrid g;
    g.nodes = std::move(nodes);
    g.weights = Eigen::ArrayXd::Zero(g.nodes.size());
    section_weights(g.nodes, 0, g.nodes.size() - 1, g.weights);
    return g;
}

RadialGrid default_grid(double rho0, double rho_max, double du_target) {
    // pick n_geo so that the last geometric step ~ du_target, then set the
    // uniform spacing equal to that step
    const double decades = std::log(1.0 / rho0);
    int n_geo = std::max(8, static_cast<int>(std::lround(decades / du_target)));
    const double ratio = std::pow(1.0 / rho0, 1.0 / n_geo);
    const double last_step = 1.0 - 1.0 / ratio;
    int n_uni =
        std::max(8, static_cast<int>(std::ceil((rho_max - 1.0) / last_step)) + 1);
    return make_grid(rho0, rho_max, n_geo, n_uni);
}

std::shared_ptr<const RadialGrid> make_shared_grid(RadialGrid g) {
    return std::make_shared<const RadialGrid>(std::move(g));
}

Profile::Profile(std::shared_ptr<const RadialGrid> g, Eigen::ArrayXd vals,
                 Eigen::ArrayXd ders)
    : grid(std::move(g)), values(std::move(vals)), derivs(std::move(ders)) {
    const Eigen::Index n = grid->size();
    if (values.size() != n || derivs.size() != n)
        throw ConfigError("Profile: array lengths must match the grid");
    if (!values.isFinite().all() || !derivs.isFinite().all())
        throw DomainError("Profile: non-finite node data");

    // Clamp slopes into the Fritsch-Carlson box of every adjacent interval.
    slopes_ = derivs;
    Eigen::ArrayXd sec(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        sec(i) = (values(i + 1) - values(i)) /
                 (grid->nodes(i + 1) - grid->nodes(i));
    auto clamp_to = [](double m, double s) {
        if (s == 0.0) return 0.0;
        const double r = m / s;
        return std::clamp(r, 0.0, 3.0) * s;
    };
    slopes_(0) = clamp_to(slopes_(0), sec(0));
    slopes_(n - 1) = clamp_to(slopes_(n - 1), sec(n - 2));
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double sl = sec(i - 1), sr = sec(i);
        if (sl * sr <= 0.0) {
            slopes_(i) = 0.0;
        } else {
            const double bound = 3.0 * std::min(std::abs(sl), std::abs(sr));
            const double sgn = sl > 0.0 ? 1.0 : -1.0;
            slopes_(i) = sgn * std::clamp(slopes_(i) * sgn, 0.0, bound);
        }
    }
}

namespace {

inline void hermite_eval(double x0, double x1, double y0, double y1, double m0,
                         double m1, double rho, double& val, double& der) {
    const double h = x1 - x0;
    const double t = (rho - x0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    val = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
    const double d00 = (6 * t2 - 6 * t) / h;
    const double d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h;
    const double d11 = 3 * t2 - 2 * t;
    der = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
}

}  // namespace

double Profile::value_at(double rho) const {
    const double lo = grid->rho0(), hi = grid->rho_max();
    if (rho < lo - 1e-12 * lo || rho > hi * (1.0 + 1e-12))
        throw DomainError("Profile: query outside [rho0, rho_max]");
    rho = std::clamp(rho, lo, hi);
    const Eigen::Index i = grid->locate(rho);
    double v, d;
    hermite_eval(grid->nodes(i), grid->nodes(i + 1), values(i), values(i + 1),
                 slopes_(i), slopes_(i + 1), rho, v, d);
    return v;
}

double Profile::deriv_at(double rho) const {
    const double lo = grid->rho0(), hi = grid->rho_max();
    if (rho < lo - 1e-12 * lo || rho > hi * (1.0 + 1e-12))
        throw DomainError("Profile: query outside [rho0, rho_max]");
    rho = std::clamp(rho, lo, hi);
    const Eigen::Index i = grid->locate(rho);
    double v, d;
    hermite_eval(grid->nodes(i), grid->nodes(i + 1), values(i), values(i + 1),
                 slopes_(i), slopes_(i + 1), rho, v, d);
    return d;
}

double interpolate(const Profile& p, double rho) { return p.value_at(rho); }

double quadrature(const RadialGrid& grid, const Eigen::ArrayXd& samples) {
    if (samples.size() != grid.size())
        throw ConfigError("quadrature: sample length mismatch");
    if (!samples.isFinite().all())
        throw DomainError("quadrature: non-finite samples");
    return (grid.weights * samples).sum();
}

Profile profile_from_fn(std::shared_ptr<const RadialGrid> g,
                        const std::function<double(double)>& value,
                        const std::function<double(double)>& deriv) {
    const Eigen::Index n = g->size();
    Eigen::ArrayXd vals(n), ders(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        vals(i) = value(g->nodes(i));
        ders(i) = deriv(g->nodes(i));
    }
    return Profile(std::move(g), std::move(vals), std::move(ders));
}

}  // namespace dyonlab
