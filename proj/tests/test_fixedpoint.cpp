#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dyonlab/fixedpoint.hpp"
#include "dyonlab/observables.hpp"
#include "dyonlab/verify.hpp"

using namespace dyonlab;

namespace {

// share the expensive solves across test cases
const DyonSolution& bps_solution() {
    static const DyonSolution sol = solve_dyon(ModelParameters::dyon(0.0, 0.0));
    return sol;
}

const DyonSolution& dyon_solution() {
    static const DyonSolution sol = solve_dyon(ModelParameters::dyon(1.0, 0.3));
    return sol;
}

}  // namespace

TEST_CASE("weighted norm: zeros, homogeneity, closed-form value") {
    auto grid = make_shared_grid(default_grid(1e-4, 25.0));
    const Eigen::Index n = grid->size();
    const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(n);
    CHECK(weighted_norm(*grid, zero, zero) == 0.0);

    // J = rho^2, h = rho gives rho^{1/2}(1+rho^{1/2}) twice; the sup sits
    // at rho_max
    const Eigen::ArrayXd J = grid->nodes.square();
    const Eigen::ArrayXd h = grid->nodes;
    const double expect =
        2.0 * (std::sqrt(25.0) + 25.0);  // 2(sqrt(rho)+rho) at rho = 25
    CHECK(weighted_norm(*grid, J, h, 0.5) ==
          doctest::Approx(expect).epsilon(1e-12));

    CHECK(weighted_norm(*grid, 2.0 * J, 2.0 * h, 0.5) ==
          doctest::Approx(2.0 * weighted_norm(*grid, J, h, 0.5)));

    CHECK_THROWS_AS(weighted_norm(*grid, J, h, 1.5), ConfigError);
}

TEST_CASE("default seed lies in the admissible set") {
    const auto params = ModelParameters::dyon(1.0, 0.3);
    auto grid = make_shared_grid(default_grid(1e-4, 25.0));
    const IterationState st = default_seed(params, grid);
    const Eigen::Index n = grid->size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        CHECK(st.h.values(i) <= st.h.values(i + 1));  // tanh saturates in double
        CHECK(st.J.values(i) < st.J.values(i + 1));
        if (st.h.values(i + 1) < 1.0 - 1e-12)
            CHECK(st.h.values(i) < st.h.values(i + 1));
    }
    CHECK(st.h.values.maxCoeff() <= 1.0);
    CHECK((st.J.values / grid->nodes).maxCoeff() <= params.bigC + 1e-12);
    CHECK(st.h.values(n - 1) >= 1.0 - 1e-6);
}

TEST_CASE("apply_T at the closed-form fixed point barely moves") {
    const auto params = ModelParameters::dyon(0.0, 0.0);
    auto grid = make_shared_grid(default_grid(1e-4, 25.0));
    const OracleSolution o = bps_oracle(0.0);
    IterationState st;
    st.J = o.sample_J(grid);
    st.h = o.sample_h(grid);
    const IterationState next = apply_T(st, params);
    CHECK(next.delta_norm <= 1e-6);
    CHECK(std::abs(next.a_star + 1.0 / 6.0) <= 1e-5);
    CHECK(std::abs(next.b_star - 1.0 / 3.0) <= 1e-6);
    CHECK(next.c_star == 0.0);
    CHECK(next.history.size() == 1);
}

TEST_CASE("monopole mode keeps J identically zero through sweeps") {
    const auto params = ModelParameters::monopole(1.0);
    auto grid = make_shared_grid(default_grid(1e-4, 25.0));
    IterationState st = default_seed(params, grid);
    CHECK(st.J.values.abs().maxCoeff() == 0.0);
    const IterationState next = apply_T(st, params);
    CHECK(next.J.values.abs().maxCoeff() == 0.0);
    CHECK(next.c_star == 0.0);
}

TEST_CASE("first sweep from the default seed improves the origin behavior") {
    const auto params = ModelParameters::dyon(1.0, 0.3);
    auto grid = make_shared_grid(default_grid(1e-4, 25.0));
    IterationState st = default_seed(params, grid);
    const IterationState s1 = apply_T(st, params);
    // h(rho0) moves toward 0 (the tanh seed overshoots the b* rho0 scale)
    CHECK(std::abs(s1.h.values(0)) < std::abs(st.h.values(0)));
    IterationState relaxed = s1;
    relaxed.J = Profile(grid, 0.3 * st.J.values + 0.7 * s1.J.values,
                        0.3 * st.J.derivs + 0.7 * s1.J.derivs);
    relaxed.h = Profile(grid, 0.3 * st.h.values + 0.7 * s1.h.values,
                        0.3 * st.h.derivs + 0.7 * s1.h.derivs);
    const IterationState s2 = apply_T(relaxed, params);
    CHECK(s2.delta_norm < s1.delta_norm);
}

TEST_CASE("solve_dyon matches the closed form at beta = 0, C = 0") {
    const DyonSolution& sol = bps_solution();
    const OracleDistance d = compare_to_oracle(sol, bps_oracle(0.0));
    CHECK(d.F <= 1e-4);
    CHECK(d.h <= 1e-4);
    CHECK(d.J == 0.0);
    CHECK(std::abs(sol.a_star + 1.0 / 6.0) <= 1e-4);
    CHECK(std::abs(sol.b_star - 1.0 / 3.0) <= 1e-4);
    CHECK(sol.iterations <= 50);
    CHECK(sol.residuals.max() <= 1e-6);
    CHECK_FALSE(sol.residual_warning);
    CHECK_FALSE(sol.boundary_warning);
    CHECK(sol.history.size() == static_cast<size_t>(sol.iterations));
    CHECK(sol.history.back().delta_norm < 1e-8);
}

TEST_CASE("solve_dyon matches the closed form at beta = 0, C = 0.6") {
    const DyonSolution sol = solve_dyon(ModelParameters::dyon(0.0, 0.6));
    const OracleDistance d = compare_to_oracle(sol, bps_oracle(0.6));
    CHECK(d.max() <= 1e-4);
    CHECK(std::abs(sol.c_star - 0.16) <= 1e-4);
    CHECK(std::abs(sol.a_star + 0.64 / 6.0) <= 1e-4);
}

TEST_CASE("beta = 1, C = 0.3 converges with admissible iterates") {
    const DyonSolution& sol = dyon_solution();
    CHECK(sol.iterations <= 50);
    CHECK(sol.residuals.max() <= 1e-6);

    const RadialGrid& g = *sol.F.grid;
    const Eigen::Index n = g.size();
    // set-S conditions on the accepted pair
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        CHECK(sol.h.values(i + 1) >= sol.h.values(i) - 1e-9);
        CHECK(sol.J.values(i + 1) >= sol.J.values(i) - 1e-12);
    }
    CHECK(sol.h.values.maxCoeff() <= 1.0 + 1e-8);
    CHECK(sol.h.values.minCoeff() > 0.0);
    CHECK((sol.J.values / g.nodes).maxCoeff() <= sol.params.bigC + 1e-9);

    // applying T once more moves the solution by at most ~10 fp_tol
    IterationState st;
    st.J = sol.J;
    st.h = sol.h;
    const IterationState again = apply_T(st, sol.params);
    CHECK(again.delta_norm <= 10.0 * 1e-8);
}

TEST_CASE("both documented seeds land on the same solution") {
    const auto params = ModelParameters::dyon(1.0, 0.3);
    const DyonSolution& a = dyon_solution();

    auto grid = a.F.grid;
    IterationState alt;
    alt.h = profile_from_fn(
        grid, [](double r) { return r / (1.0 + r); },
        [](double r) { return 1.0 / ((1.0 + r) * (1.0 + r)); });
    alt.J = profile_from_fn(
        grid, [&](double r) { return params.bigC * r * r / (1.0 + r); },
        [&](double r) {
            return params.bigC * r * (2.0 + r) / ((1.0 + r) * (1.0 + r));
        });
    const DyonSolution b = solve_dyon(params, {}, &alt);
    const double dist = weighted_norm(*grid, a.J.values - b.J.values,
                                      a.h.values - b.h.values, 0.5);
    CHECK(dist <= 1e-6);
    CHECK(b.iterations <= 50);
}

TEST_CASE("non-convergence raises ConvergenceError with history") {
    SolveOptions opts;
    opts.max_sweeps = 2;
    opts.fp_tol = 1e-14;
    try {
        solve_dyon(ModelParameters::dyon(1.0, 0.3), opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(std::string(e.what()).find("delta_norm history") !=
              std::string::npos);
    }
}

TEST_CASE("tail values extend the profiles beyond rho_max") {
    const DyonSolution& sol = dyon_solution();
    const double rho_max = sol.F.rho_max();
    const double nu = sol.params.nu();

    const Eigen::Index n = sol.F.values.size();
    const double F2 = tail_value(Component::F, sol, 2.0 * rho_max);
    CHECK(F2 ==
          doctest::Approx(sol.F.values(n - 1) * std::exp(-nu * rho_max))
              .epsilon(1e-12));
    CHECK(tail_value(Component::F, sol, rho_max) ==
          doctest::Approx(sol.F.values(n - 1)));

    // h tail decays at min(beta, 2 nu) toward 1
    const double h_far = tail_value(Component::h, sol, rho_max + 5.0);
    const double kappa = std::min(sol.params.beta, 2.0 * nu);
    CHECK(1.0 - h_far ==
          doctest::Approx((1.0 - sol.h.values(n - 1)) * std::exp(-5.0 * kappa))
              .epsilon(1e-12));

    // J tail is affine: C rho - D
    const double J1 = tail_value(Component::J, sol, rho_max + 1.0);
    const double J2 = tail_value(Component::J, sol, rho_max + 2.0);
    CHECK(J2 - J1 == doctest::Approx(sol.params.bigC).epsilon(1e-12));

    CHECK_THROWS_AS(tail_value(Component::F, sol, 0.5 * rho_max), DomainError);
}

TEST_CASE("beta = 0 tails: algebraic h approach and D = C/nu") {
    const DyonSolution sol = solve_dyon(ModelParameters::dyon(0.0, 0.6));
    const double rho_max = sol.F.rho_max();
    const Eigen::Index n = sol.F.values.size();

    const double D = sol.params.bigC * rho_max - sol.J.values(n - 1);
    CHECK(D == doctest::Approx(0.6 / 0.8).epsilon(1e-3));

    // h tail model is 1 - A/rho at beta = 0
    const double A = (1.0 - sol.h.values(n - 1)) * rho_max;
    const double h_double = tail_value(Component::h, sol, 2.0 * rho_max);
    CHECK(1.0 - h_double == doctest::Approx(A / (2.0 * rho_max)).epsilon(1e-12));
}
