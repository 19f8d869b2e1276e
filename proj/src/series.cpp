#include "dyonlab/series.hpp"

#include <cmath>

#include "dyonlab/errors.hpp"

namespace dyonlab {

double FrozenField::operator()(double rho) const {
    switch (law) {
        case Law::zero:
            return 0.0;
        case Law::linear:
            if (rho < rho0) return coef * rho;
            break;
        case Law::quadratic:
            if (rho < rho0) return coef * rho * rho;
            break;
        case Law::one_plus_quadratic:
            if (rho < rho0) return 1.0 + coef * rho * rho;
            break;
    }
    return profile->value_at(rho);
}

FrozenField FrozenField::zero() { return {}; }

FrozenField FrozenField::higgs(const Profile& h) {
    FrozenField f;
    f.profile = &h;
    f.law = Law::linear;
    f.rho0 = h.rho0();
    f.coef = h.values(0) / f.rho0;
    return f;
}

FrozenField FrozenField::electric(const Profile& J) {
    FrozenField f;
    f.profile = &J;
    f.law = Law::quadratic;
    f.rho0 = J.rho0();
    f.coef = J.values(0) / (f.rho0 * f.rho0);
    return f;
}

FrozenField FrozenField::gauge(const Profile& F) {
    FrozenField f;
    f.profile = &F;
    f.law = Law::one_plus_quadratic;
    f.rho0 = F.rho0();
    f.coef = (F.values(0) - 1.0) / (f.rho0 * f.rho0);
    return f;
}

double series_delta(double leading) {
    return std::min(0.05, 0.5 / std::sqrt(1.0 + std::abs(leading)));
}

namespace {

constexpr int kSubIntervals = 128;
constexpr int kMaxSweeps = 50;
constexpr double kTolerance = 1e-12;

// Cumulative integral of samples on a uniform sub-grid, locally cubic
// (fourth order): I[j] = integral from 0 to x_j.
void cumulative_integral(const std::vector<double>& f, double dx,
                         std::vector<double>& I) {
    const int n = static_cast<int>(f.size()) - 1;
    I[0] = 0.0;
    I[1] = I[0] + dx * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]) / 24.0;
    for (int j = 1; j + 2 <= n; ++j)
        I[j + 1] =
            I[j] + dx * (-f[j - 1] + 13 * f[j] + 13 * f[j + 1] - f[j + 2]) / 24.0;
    I[n] = I[n - 1] +
           dx * (f[n - 3] - 5 * f[n - 2] + 19 * f[n - 1] + 9 * f[n]) / 24.0;
}

// Generic Picard solver for y(rho) = lead*rho^2 +
// (1/3) * [ rho^2 * int_0^rho S/r dr - (1/rho) * int_0^rho r^2 S dr ],
// where S = source(r, y). Returns (value, derivative) at the last sub-node.
std::pair<double, double> picard(
    double lead, double rho_eval,
    const std::function<double(double, double)>& source, const char* what,
    SeriesDiag* diag) {
    if (!(rho_eval > 0.0) || !std::isfinite(rho_eval) || !std::isfinite(lead))
        throw DomainError("series: bad arguments");

    const int m = kSubIntervals;
    const double dx = rho_eval / m;
    std::vector<double> r(m + 1), y(m + 1), a(m + 1), b(m + 1), A(m + 1),
        B(m + 1);
    for (int j = 0; j <= m; ++j) {
        r[j] = dx * j;
        y[j] = lead * r[j] * r[j];
    }

    if (diag) {
        diag->sweeps = 0;
        diag->deltas.clear();
    }

    double delta = 0.0;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        a[0] = 0.0;
        b[0] = 0.0;
        for (int j = 1; j <= m; ++j) {
            const double S = source(r[j], y[j]);
            a[j] = S / r[j];
            b[j] = r[j] * r[j] * S;
        }
        cumulative_integral(a, dx, A);
        cumulative_integral(b, dx, B);
        delta = 0.0;
        for (int j = 1; j <= m; ++j) {
            const double ynew = lead * r[j] * r[j] +
                                (r[j] * r[j] * A[j] - B[j] / r[j]) / 3.0;
            delta = std::max(delta, std::abs(ynew - y[j]));
            y[j] = ynew;
        }
        if (diag) {
            ++diag->sweeps;
            diag->deltas.push_back(delta);
        }
        if (delta <= kTolerance) {
            const double value = y[m];
            const double deriv = 2.0 * lead * rho_eval +
                                 (2.0 * rho_eval * A[m] +
                                  B[m] / (rho_eval * rho_eval)) /
                                     3.0;
            if (!std::isfinite(value) || !std::isfinite(deriv))
                throw SeriesError(std::string(what) +
                                  ": non-finite Picard iterate");
            return {value, deriv};
        }
        if (!std::isfinite(delta))
            throw SeriesError(std::string(what) + ": Picard iteration diverged");
    }
    throw SeriesError(std::string(what) +
                      ": no Picard convergence in 50 sweeps (rho_eval too "
                      "large for this leading coefficient)");
}

}  // namespace

std::pair<double, double> f_series(double a, const FrozenField& J,
                                   const FrozenField& h, double rho_eval,
                                   SeriesDiag* diag) {
    if (!(a <= 0.0)) throw DomainError("f_series: requires a <= 0");
    auto source = [&](double r, double f) {
        const double hv = h(r);
        const double Jv = J(r);
        return (hv * hv - (Jv / r) * (Jv / r)) * (f + 1.0) +
               f * f * (3.0 + f) / (r * r);
    };
    return picard(a, rho_eval, source, "f_series", diag);
}

std::pair<double, double> h_series(double b, const FrozenField& F, double beta,
                                   double rho_eval, SeriesDiag* diag) {
    if (!(b >= 0.0)) throw DomainError("h_series: requires b >= 0");
    auto source = [&](double r, double H) {
        const double Fv = F(r);
        return (2.0 * (Fv * Fv - 1.0) / (r * r) +
                0.5 * beta * beta * (H * H / (r * r) - 1.0)) *
               H;
    };
    return picard(b, rho_eval, source, "h_series", diag);
}

std::pair<double, double> j_series(double c, const FrozenField& F,
                                   double rho_eval, SeriesDiag* diag) {
    if (!(c >= 0.0)) throw DomainError("j_series: requires c >= 0");
    auto source = [&](double r, double Jv) {
        const double Fv = F(r);
        return 2.0 * (Fv * Fv - 1.0) * Jv / (r * r);
    };
    return picard(c, rho_eval, source, "j_series", diag);
}

std::pair<double, double> f_series(double a, const Profile& J, const Profile& h,
                                   double rho_eval) {
    return f_series(a, FrozenField::electric(J), FrozenField::higgs(h),
                    rho_eval);
}

std::pair<double, double> h_series(double b, const Profile& F, double beta,
                                   double rho_eval) {
    return h_series(b, FrozenField::gauge(F), beta, rho_eval);
}

std::pair<double, double> j_series(double c, const Profile& F,
                                   double rho_eval) {
    return j_series(c, FrozenField::gauge(F), rho_eval);
}

OriginExpansion make_f_expansion(double a, Profile J, Profile h) {
    OriginExpansion e;
    e.kind = OriginExpansion::Kind::F_type;
    e.leading = a;
    e.valid_to = series_delta(a);
    e.evaluator = [a, J = std::move(J), h = std::move(h)](double rho) {
        return f_series(a, J, h, rho);
    };
    return e;
}

OriginExpansion make_h_expansion(double b, Profile F, double beta) {
    OriginExpansion e;
    e.kind = OriginExpansion::Kind::H_type;
    e.leading = b;
    e.valid_to = series_delta(b);
    e.evaluator = [b, beta, F = std::move(F)](double rho) {
        return h_series(b, F, beta, rho);
    };
    return e;
}

OriginExpansion make_j_expansion(double c, Profile F) {
    OriginExpansion e;
    e.kind = OriginExpansion::Kind::J_type;
    e.leading = c;
    e.valid_to = series_delta(c);
    e.evaluator = [c, F = std::move(F)](double rho) {
        return j_series(c, F, rho);
    };
    return e;
}

}  // namespace dyonlab
