#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dyonlab/shoot.hpp"
#include "dyonlab/verify.hpp"

using namespace dyonlab;

namespace {

struct Frozen {
    std::shared_ptr<const RadialGrid> grid;
    Profile F, h, J;
    explicit Frozen(double C, double rho_max = 25.0)
        : grid(make_shared_grid(default_grid(1e-4, rho_max))) {
        const OracleSolution o = bps_oracle(C);
        F = o.sample_F(grid);
        h = o.sample_h(grid);
        J = o.sample_J(grid);
    }
};

Profile tanh_profile(std::shared_ptr<const RadialGrid> g) {
    return profile_from_fn(
        g, [](double r) { return std::tanh(r); },
        [](double r) {
            const double c = std::cosh(r);
            return 1.0 / (c * c);
        });
}

Profile zero_profile(std::shared_ptr<const RadialGrid> g) {
    const Eigen::Index n = g->size();
    return Profile(std::move(g), Eigen::ArrayXd::Zero(n),
                   Eigen::ArrayXd::Zero(n));
}

}  // namespace

TEST_CASE("classify_f populates A1 at small |a| and A2 at large |a|") {
    auto grid = make_shared_grid(default_grid(1e-4, 25.0));
    const Profile J0 = zero_profile(grid);
    const Profile ht = tanh_profile(grid);

    const ShootingOutcome small = classify_f(-1e-6, J0, ht);
    CHECK(small.tag == ShotTag::A1);
    REQUIRE(small.rho_event.has_value());

    const ShootingOutcome large = classify_f(-100.0, J0, ht);
    CHECK(large.tag == ShotTag::A2);
    REQUIRE(large.rho_event.has_value());

    CHECK_THROWS_AS(classify_f(0.5, J0, ht), DomainError);
}

TEST_CASE("classify_f accepts the closed-form shooting constant") {
    const Frozen bps(0.0);
    const ShootingOutcome out = classify_f(-1.0 / 6.0, bps.J, bps.h);
    CHECK(out.tag == ShotTag::accept);
}

TEST_CASE("solve_f recovers the closed-form monopole F") {
    const Frozen bps(0.0);
    const FSolve fs = solve_f(bps.J, bps.h);
    CHECK(std::abs(fs.a_star - (-1.0 / 6.0)) <= 1e-5);

    const OracleSolution o = bps_oracle(0.0);
    double sup = 0.0;
    const RadialGrid& g = *bps.grid;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        sup = std::max(sup, std::abs(fs.F.values(i) - o.F(g.nodes(i))));
    CHECK(sup <= 1e-6);

    // expected shape: decreasing, within [0,1], tiny at rho_max
    CHECK(fs.F.values.maxCoeff() <= 1.0 + 1e-10);
    CHECK(fs.F.values.minCoeff() >= -1e-10);
    for (Eigen::Index i = 0; i + 1 < g.size(); ++i)
        CHECK(fs.F.values(i + 1) <= fs.F.values(i) + 1e-10);
    CHECK(std::abs(fs.F.values(g.size() - 1)) <= 1e-6);
    CHECK_FALSE(fs.boundary_warning);

    // F(rho0) = 1 + a* rho0^2 to leading order
    CHECK(fs.F.values(0) ==
          doctest::Approx(1.0 + fs.a_star * 1e-8).epsilon(1e-10));

    // (F-1)/rho^2 increasing on (0, 1]
    for (Eigen::Index i = 0; i + 1 < g.size() && g.nodes(i + 1) <= 1.0; ++i) {
        const double r0 = g.nodes(i), r1 = g.nodes(i + 1);
        const double g0 = (fs.F.values(i) - 1.0) / (r0 * r0);
        const double g1 = (fs.F.values(i + 1) - 1.0) / (r1 * r1);
        const double noise = 4.4e-16 / (r0 * r0) + 4.4e-16 / (r1 * r1);
        CHECK(g1 >= g0 - 1e-8 * std::abs(g0) - noise);
    }
}

TEST_CASE("solve_f against the C = 0.6 dyon family") {
    const double C = 0.6, nu = 0.8;
    const Frozen bps(C, 25.0 / nu);
    const FSolve fs = solve_f(bps.J, bps.h);
    // F = nu rho / sinh(nu rho): leading coefficient is -nu^2/6
    CHECK(std::abs(fs.a_star - (-nu * nu / 6.0)) <= 1e-5);

    const OracleSolution o = bps_oracle(C);
    double sup = 0.0;
    for (Eigen::Index i = 0; i < bps.grid->size(); ++i)
        sup = std::max(sup,
                       std::abs(fs.F.values(i) - o.F(bps.grid->nodes(i))));
    CHECK(sup <= 1e-6);
}

TEST_CASE("solve_f reports a scan failure on hopeless frozen data") {
    // h frozen at 0 kills the A1 mechanism: every a < 0 dives to -1
    auto grid = make_shared_grid(make_grid(1e-4, 10.0, 64, 128));
    const Profile J0 = zero_profile(grid);
    const Profile h0 = zero_profile(grid);
    CHECK_THROWS_AS(solve_f(J0, h0), ShootingError);
}

TEST_CASE("classify_h populates B1 at small b and B2 at large b") {
    const Frozen bps(0.0);
    const ShootingOutcome lo = classify_h(1e-8, bps.F, 1.0);
    CHECK(lo.tag == ShotTag::B1);
    const ShootingOutcome hi = classify_h(1e3, bps.F, 1.0);
    CHECK(hi.tag == ShotTag::B2);
    CHECK_THROWS_AS(classify_h(-1.0, bps.F, 1.0), DomainError);
    CHECK_THROWS_AS(classify_h(1.0, bps.F, 0.0), DomainError);
}

TEST_CASE("B2 proxy agrees with the full blow-up guard") {
    // the h-exceeds-1+margin event is an accelerator; disabling it (margin
    // beyond any reachable value) must classify the same trajectories B2
    // through the 1e6 guard alone
    const Frozen bps(0.0);
    ShootOptions full;
    full.b2_margin = 1e12;
    for (double b : {3.0, 30.0, 1e3}) {
        CHECK(classify_h(b, bps.F, 1.0).tag == ShotTag::B2);
        const ShootingOutcome slow = classify_h(b, bps.F, 1.0, full);
        CHECK(slow.tag == ShotTag::B2);
    }
}

TEST_CASE("solve_h beta = 0 recovers the closed-form Higgs profile") {
    const Frozen bps(0.0);
    const HSolve hs = solve_h(bps.F, 0.0);
    CHECK(std::abs(hs.b_star - 1.0 / 3.0) <= 1e-6);

    const OracleSolution o = bps_oracle(0.0);
    double sup = 0.0;
    const RadialGrid& g = *bps.grid;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        sup = std::max(sup, std::abs(hs.h.values(i) - o.h(g.nodes(i))));
    CHECK(sup <= 1e-6);

    for (Eigen::Index i = 0; i + 1 < g.size(); ++i)
        CHECK(hs.h.values(i + 1) >= hs.h.values(i) - 1e-10);
    CHECK(hs.h.values.maxCoeff() <= 1.0 + 1e-10);
}

TEST_CASE("beta = 0 h-equation is scale invariant in the trial b") {
    // independent linearity oracle: integrate the H equation with b = 1 and
    // b = 2 seeds and compare terminal states
    const Frozen bps(0.0);
    const RadialGrid& g = *bps.grid;
    const FrozenField F = FrozenField::gauge(bps.F);
    auto Hrhs = [&](double rho, double H, double) {
        const double Fv = F(rho);
        return 2.0 * Fv * Fv * H / (rho * rho);
    };
    const std::array<EventSpec, 0> no_events{};
    auto run = [&](double b) {
        const auto [H0, dH0] = h_series(b, F, 0.0, g.rho0());
        IntegrateOptions io;
        return integrate_to_event({g.rho0(), H0, dH0}, Hrhs, no_events, 10.0,
                                  io)
            .final_state;
    };
    const StateVector s1 = run(1.0), s2 = run(2.0);
    CHECK(s2.y == doctest::Approx(2.0 * s1.y).epsilon(1e-7));
    CHECK(s2.dy == doctest::Approx(2.0 * s1.dy).epsilon(1e-7));
}

TEST_CASE("solve_h beta = 1 against the closed-form F") {
    const Frozen bps(0.0);
    const HSolve hs = solve_h(bps.F, 1.0);
    const RadialGrid& g = *bps.grid;
    const Eigen::Index n = g.size();

    CHECK(hs.h.values(n - 1) >= 1.0 - 1e-4);
    CHECK_FALSE(hs.boundary_warning);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        CHECK(hs.h.values(i + 1) >= hs.h.values(i) - 1e-9);
    CHECK(hs.h.values.maxCoeff() <= 1.0 + 1e-8);
    CHECK(hs.h.values.minCoeff() >= -1e-12);
    CHECK(hs.b_star > 0.0);

    // rho^{-1} h decreasing on (0, 1]
    for (Eigen::Index i = 0; i + 1 < n && g.nodes(i + 1) <= 1.0; ++i) {
        const double g0 = hs.h.values(i) / g.nodes(i);
        const double g1 = hs.h.values(i + 1) / g.nodes(i + 1);
        CHECK(g1 <= g0 + 1e-8 * std::abs(g0));
    }
}

TEST_CASE("solve_j matches the closed form and its bounds") {
    const double C = 0.6, nu = 0.8;
    const Frozen bps(C, 25.0 / nu);
    const JSolve js = solve_j(bps.F, C);
    CHECK(std::abs(js.c_star - C * nu / 3.0) <= 1e-5);

    const OracleSolution o = bps_oracle(C);
    const RadialGrid& g = *bps.grid;
    double sup = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        sup = std::max(sup, std::abs(js.J.values(i) - o.J(g.nodes(i))));
    CHECK(sup <= 1e-6);

    // J'(rho_max) = C by construction; J' < C strictly where the source
    // is still resolvable, never above C anywhere
    CHECK(js.J.derivs(g.size() - 1) == doctest::Approx(C).epsilon(1e-10));
    CHECK(js.J.derivs.maxCoeff() <= C + 1e-12);
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (g.nodes(i) <= 0.8 * g.rho_max()) CHECK(js.J.derivs(i) < C);

    // rho^{-2} J decreasing on (0, 1]
    for (Eigen::Index i = 0; i + 1 < g.size() && g.nodes(i + 1) <= 1.0; ++i) {
        const double g0 = js.J.values(i) / (g.nodes(i) * g.nodes(i));
        const double g1 =
            js.J.values(i + 1) / (g.nodes(i + 1) * g.nodes(i + 1));
        CHECK(g1 <= g0 + 1e-8 * std::abs(g0));
    }

    const JSolve none = solve_j(bps.F, 0.0);
    CHECK(none.c_star == 0.0);
    CHECK(none.J.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("solve_j is linear in the trial constant") {
    const Frozen bps(0.6, 25.0 / 0.8);
    const RadialGrid& g = *bps.grid;
    const FrozenField F = FrozenField::gauge(bps.F);
    auto Jrhs = [&](double rho, double Jv, double) {
        const double Fv = F(rho);
        return 2.0 * Jv * Fv * Fv / (rho * rho);
    };
    const std::array<EventSpec, 0> no_events{};
    auto run = [&](double c) {
        const auto [J0, dJ0] = j_series(c, F, g.rho0());
        IntegrateOptions io;
        return integrate_to_event({g.rho0(), J0, dJ0}, Jrhs, no_events, 12.0,
                                  io)
            .final_state;
    };
    const StateVector s1 = run(1.0), s2 = run(2.0);
    CHECK(s2.y == doctest::Approx(2.0 * s1.y).epsilon(1e-7));
    CHECK(s2.dy == doctest::Approx(2.0 * s1.dy).epsilon(1e-7));
}
