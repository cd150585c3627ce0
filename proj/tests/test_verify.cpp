#include "pcf/errors.hpp"
#include "pcf/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace pcf;

namespace {

SolitonParams interacting(double eps = 0.01) {
    SolitonParams p;
    p.epsilon = eps;
    p.theta = {BumpFamily::quartic_cosine, 8.5, 1.4, 1.0};
    p.sigma = {BumpFamily::quartic_cosine, 8.5, 1.4, 1.0};
    return p;
}

PerturbationBumps displacement_bumps() {
    PerturbationBumps b;
    b.z0 = {BumpFamily::quartic_cosine, -1.4, 8.5, 1.0};
    b.s0 = {BumpFamily::quartic_cosine, -1.4, 8.5, 1.0};
    return b;
}

} // namespace

TEST_CASE("fit_order: exact power laws") {
    const std::vector<double> h = {0.1, 0.05, 0.025};
    CHECK(fit_order(h, {3e-2, 7.5e-3, 1.875e-3}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit_order(h, {1e-3, 5e-4, 2.5e-4}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isnan(fit_order(h, {0.0, 0.0, 0.0})));
    CHECK_THROWS_AS(fit_order({0.1}, {1.0}), DomainError);
}

TEST_CASE("soliton residual: exact form converges, printed forms do not") {
    const std::vector<double> hs = {1.0 / 32, 1.0 / 64, 1.0 / 128};
    const ConvergenceReport exact = soliton_pde_residual(interacting(), hs);
    CHECK(exact.fitted_order >= 1.8);
    CHECK(exact.fitted_order <= 2.2);
    for (SolitonForm f : {SolitonForm::printed_phase, SolitonForm::printed_phase_gamma1}) {
        const ConvergenceReport r = soliton_pde_residual(interacting(), hs, f);
        CHECK(r.errors.back() > 100.0 * exact.errors.back());
        CHECK(r.fitted_order < 0.5);
    }
    CHECK(soliton_pde_residual(interacting(0.0), hs).all_zero());
}

TEST_CASE("derivative formulas: ratio 4 and exact zero when flat") {
    const auto pts = random_interaction_points(interacting(), 20, 99u, 2e-3);
    CHECK(pts.size() == 20);
    const ConvergenceReport r = derivative_formula_check(interacting(), pts);
    for (double f : r.reduction_factors()) CHECK(f == doctest::Approx(4.0).epsilon(0.1));
    CHECK(derivative_formula_check(interacting(0.0), pts).all_zero());
}

TEST_CASE("mode consistency: zero perturbation is exact, small data converges") {
    // Both modes are stationary only on the flat background.
    const ModeConsistencySetup zero = auto_domain_setup(interacting(0.0), displacement_bumps(), 0.0, 1.0);
    CHECK(mode_discrepancy(zero, 1.0 / 16) <= 1e-14);

    const ModeConsistencySetup s = auto_domain_setup(interacting(), displacement_bumps(), 0.005, 2.0);
    CHECK(s.x_lo <= -9.9 - 2.0);
    CHECK(s.x_hi >= 9.9 + 2.0);
    const ConvergenceReport r = mode_consistency(s, {1.0 / 16, 1.0 / 32});
    CHECK(r.reduction_factors().front() == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("free wave: translation order, energy and frozen phi") {
    FreeWaveSetup s;
    s.t_end = 2.0;
    s.x_lo = -10;
    s.x_hi = 10;
    const FreeWaveResult r = free_wave_oracle(s, {1.0 / 16, 1.0 / 32, 1.0 / 64});
    CHECK(r.translation.fitted_order >= 1.8);
    CHECK(r.translation.fitted_order <= 2.2);
    CHECK(r.energy.errors.back() < 1e-6);
    CHECK(r.max_phi_drift == 0.0);

    FreeWaveSetup still = s;
    still.packet.amplitude = 0.0;
    const FreeWaveResult z = free_wave_oracle(still, {1.0 / 16, 1.0 / 32});
    CHECK(z.translation.all_zero());
}

TEST_CASE("virial convergence: both residuals at order 2") {
    const ModeConsistencySetup s = auto_domain_setup(interacting(), displacement_bumps(), 0.005, 1.0);
    const VirialConvergence v = virial_convergence(s, 1.0, {1.0 / 16, 1.0 / 32, 1.0 / 64});
    CHECK(v.energy.fitted_order >= 1.8);
    CHECK(v.energy.fitted_order <= 2.2);
    CHECK(v.momentum.fitted_order >= 1.8);
    CHECK(v.momentum.fitted_order <= 2.2);
    CHECK(v.identity_gap <= 1e-10);
    CHECK_THROWS_AS(virial_convergence(s, 0.0, {1.0 / 16}), InsufficientHistory);
}
