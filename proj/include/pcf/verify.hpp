#pragma once

#include "pcf/dynamics.hpp"
#include "pcf/evolution.hpp"

#include <string>
#include <vector>

namespace pcf {

struct ConvergenceReport {
    std::string name;
    std::vector<double> resolutions;  // strictly decreasing
    std::vector<double> errors;
    double fitted_order = 0.0;        // NaN when any error is exactly zero

    bool all_zero() const;
    // Ratio errors[i] / errors[i+1].
    std::vector<double> reduction_factors() const;
};

// Least-squares slope of log(error) against log(resolution).
double fit_order(const std::vector<double>& resolutions, const std::vector<double>& errors);

// Max-norm residual of the field equations applied to the closed form with
// centered differences of step h in t and x, on a fixed lattice of points
// around the place where theta and sigma overlap.
ConvergenceReport soliton_pde_residual(const SolitonParams& params, const std::vector<double>& hs,
                                       SolitonForm form = SolitonForm::exact);

// Closed-form first derivatives against central differences of B, D.
ConvergenceReport derivative_formula_check(const SolitonParams& params, const std::vector<std::pair<double, double>>& points,
                                           const std::vector<double>& hs = {1e-3, 5e-4, 2.5e-4});

// `count` seeded random (t, x) points in the interaction region, at least
// `margin` away from every bump support edge.
std::vector<std::pair<double, double>> random_interaction_points(const SolitonParams& params, int count,
                                                                 unsigned seed, double margin);

struct ModeConsistencySetup {
    SolitonParams params;
    PerturbationBumps bumps;
    double delta_scale = 0.0;
    double x_lo = -20.0, x_hi = 20.0;
    double t_end = 5.0;
    double cfl = 0.45;
    StepOptions step;
};

// Domain covering every active bump support widened by the light cone
// through t_end.
ModeConsistencySetup auto_domain_setup(const SolitonParams& params, const PerturbationBumps& bumps, double delta_scale,
                                       double t_end, const StepOptions& step = {});

// Evolves the full state and the perturbation state side by side and returns
// max over the common time levels of ||Lambda - (B+z)||_inf + ||phi - (D+s)||_inf.
double mode_discrepancy(const ModeConsistencySetup& setup, double dx);
ConvergenceReport mode_consistency(const ModeConsistencySetup& setup, const std::vector<double>& dxs);

struct FreeWaveSetup {
    BumpSpec packet{BumpFamily::quartic_cosine, 0.0, 2.0, 0.1};
    double lambda_far = 1.0;
    double phi_far = 0.0;
    double x_lo = -15.0, x_hi = 15.0;
    double t_end = 5.0;
    double cfl = 0.45;
};

struct FreeWaveResult {
    ConvergenceReport translation;  // max |Lambda - exact| at t_end
    ConvergenceReport energy;       // relative energy drift over the run
    double max_phi_drift = 0.0;     // phi must stay frozen
};

// Left-moving packet Lambda = lambda_far + f(x+t), phi constant.
FreeWaveResult free_wave_oracle(const FreeWaveSetup& setup, const std::vector<double>& dxs);

struct VirialConvergence {
    ConvergenceReport combined;    // max over both residual fields
    ConvergenceReport energy;      // d_t ehat - d_x phat - Fe
    ConvergenceReport momentum;    // d_t phat - d_x ehat - Fp
    double identity_gap = 0.0;     // max |integrated - reduced| with unit cutoffs
};

// Pointwise virial residuals at time t_eval of a perturbation-mode run,
// one entry per dx.
VirialConvergence virial_convergence(const ModeConsistencySetup& setup, double t_eval, const std::vector<double>& dxs);

} // namespace pcf
