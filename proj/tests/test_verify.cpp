#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dyonlab/verify.hpp"

using namespace dyonlab;

namespace {

const DyonSolution& dyon_run() {
    static const DyonSolution sol = solve_dyon(ModelParameters::dyon(1.0, 0.3));
    return sol;
}

}  // namespace

TEST_CASE("oracle point values") {
    const OracleSolution o = bps_oracle(0.0);
    CHECK(o.F(1.0) == doctest::Approx(0.8509181282).epsilon(1e-9));
    CHECK(o.h(1.0) == doctest::Approx(0.3130352854).epsilon(1e-9));
    CHECK(o.J(1.0) == 0.0);
    CHECK(o.F(1e-8) == doctest::Approx(1.0));
    CHECK(o.h(1e-8) == doctest::Approx(1e-8 / 3.0).epsilon(1e-10));

    CHECK_THROWS_AS(bps_oracle(1.0), ConfigError);
    CHECK_THROWS_AS(bps_oracle(-0.1), ConfigError);
}

TEST_CASE("oracle satisfies the governing equations analytically") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(1e-2, 20.0);
    for (double C : {0.0, 0.3, 0.6, 0.9}) {
        const OracleSolution o = bps_oracle(C);
        for (int k = 0; k < 50; ++k) {
            const double rho = U(rng);
            const ResidualTriple r = o.equation_residual(rho);
            CHECK(r.f_eq <= 1e-10);
            CHECK(r.h_eq <= 1e-10);
            CHECK(r.j_eq <= 1e-10);
        }
        // fixed spot checks at the radii used across the suite
        for (double rho : {0.1, 1.0, 5.0, 10.0})
            CHECK(o.equation_residual(rho).max() <= 1e-10);
    }
}

TEST_CASE("check_theorem passes on converged solutions") {
    const PropertyReport rep = check_theorem(dyon_run());
    for (const auto& c : rep.checks) {
        INFO(c.name, " measured=", c.measured, " tol=", c.tolerance);
        if (!c.informational) CHECK(c.pass);
    }
    CHECK(rep.overall);

    // pure and idempotent
    const PropertyReport again = check_theorem(dyon_run());
    REQUIRE(again.checks.size() == rep.checks.size());
    for (size_t i = 0; i < rep.checks.size(); ++i) {
        CHECK(again.checks[i].name == rep.checks[i].name);
        CHECK(again.checks[i].measured == rep.checks[i].measured);
        CHECK(again.checks[i].pass == rep.checks[i].pass);
    }
}

TEST_CASE("check_theorem on the beta = 0 closed-form pipeline output") {
    const DyonSolution sol = solve_dyon(ModelParameters::dyon(0.0, 0.0));
    const PropertyReport rep = check_theorem(sol);
    for (const auto& c : rep.checks) {
        INFO(c.name, " measured=", c.measured, " tol=", c.tolerance);
        if (!c.informational) CHECK(c.pass);
    }
    CHECK(rep.overall);
}

TEST_CASE("fault injection: a negated h profile fails the lower bound") {
    DyonSolution broken = dyon_run();
    broken.h = Profile(broken.h.grid, -broken.h.values, -broken.h.derivs);
    const PropertyReport rep = check_theorem(broken);
    CHECK_FALSE(rep.overall);
    const PropertyCheck* c = rep.find("h lower bound");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->pass);
}

TEST_CASE("monopole runs skip the J checks") {
    const DyonSolution mono = solve_dyon(ModelParameters::monopole(1.0));
    const PropertyReport rep = check_theorem(mono);
    CHECK(rep.overall);
    CHECK(rep.find("J non-decreasing") == nullptr);
    CHECK(rep.find("J' upper bound") == nullptr);
    CHECK(rep.find("F non-increasing") != nullptr);
}

TEST_CASE("fit_decay on synthetic and closed-form data") {
    auto grid = make_shared_grid(default_grid(1e-4, 25.0));
    const Profile synth = profile_from_fn(
        grid, [](double r) { return std::exp(-3.0 * r); },
        [](double r) { return -3.0 * std::exp(-3.0 * r); });
    CHECK(fit_decay(synth, DecayTarget::F) ==
          doctest::Approx(3.0).epsilon(1e-6));

    // scale invariance of the log-slope
    const Profile scaled = profile_from_fn(
        grid, [](double r) { return 7.5 * std::exp(-3.0 * r); },
        [](double r) { return -22.5 * std::exp(-3.0 * r); });
    CHECK(fit_decay(scaled, DecayTarget::F) ==
          doctest::Approx(fit_decay(synth, DecayTarget::F)).epsilon(1e-10));

    // F = rho/sinh rho decays at unit rate up to the log correction
    const OracleSolution o = bps_oracle(0.0);
    const Profile F = o.sample_F(grid);
    const double rate = fit_decay(F, DecayTarget::F);
    CHECK(rate >= 0.9);
    CHECK(rate <= 1.1);

    // non-positive samples in the window are a hard error
    const Profile neg = profile_from_fn(
        grid, [](double r) { return 1.0 - r / 20.0; },
        [](double) { return -1.0 / 20.0; });
    CHECK_THROWS_AS(fit_decay(neg, DecayTarget::F), DomainError);
}

TEST_CASE("fitted rates of the C = 0.6 family") {
    const double nu = 0.8;
    auto grid = make_shared_grid(default_grid(1e-4, 25.0 / nu));
    const OracleSolution o = bps_oracle(0.6);
    DyonSolution sol;
    sol.params = ModelParameters::dyon(0.0, 0.6);
    sol.F = o.sample_F(grid);
    sol.h = o.sample_h(grid);
    sol.J = o.sample_J(grid);

    const double rate_F = fit_decay(sol, DecayTarget::F);
    CHECK(std::abs(rate_F / nu - 1.0) <= 0.10);
    const double rate_Jpp = fit_decay(sol, DecayTarget::Jpp);
    CHECK(std::abs(rate_Jpp / (2.0 * nu) - 1.0) <= 0.15);
}

TEST_CASE("compare_to_oracle usage") {
    const OracleSolution o = bps_oracle(0.3);
    auto grid = make_shared_grid(default_grid(1e-4, 25.0));
    DyonSolution self;
    self.params = ModelParameters::dyon(0.0, 0.3);
    self.F = o.sample_F(grid);
    self.h = o.sample_h(grid);
    self.J = o.sample_J(grid);
    const OracleDistance d = compare_to_oracle(self, o);
    CHECK(d.max() == 0.0);

    DyonSolution wrong = self;
    wrong.params.beta = 1.0;
    CHECK_THROWS_AS(compare_to_oracle(wrong, o), ConfigError);
}
