#pragma once

#include "pcf/bump.hpp"

namespace pcf {

struct SolitonParams {
    double mu = 0.5;
    double lambda = 1.0;
    double epsilon = 0.0;
    BumpSpec theta;  // left-moving profile, argument x + t
    BumpSpec sigma;  // right-moving profile, argument x - t

    bool operator==(const SolitonParams&) const = default;
};

struct DerivedConstants {
    double c = 0.0;
    double v = 0.0;
    double beta = 0.0;
    double x0 = 0.0;
    double sqrt_c = 0.0;
};

struct Background {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double gamma = 0.0;
};

struct SolitonSample {
    double B = 0.0, D = 0.0;
    double B_t = 0.0, B_x = 0.0, D_t = 0.0, D_x = 0.0;
    double boxB = 0.0, boxD = 0.0;  // B_tt - B_xx, D_tt - D_xx
    double gamma1 = 0.0, gamma2 = 0.0, gamma = 0.0;
};

// Which closed form to evaluate.  Only `exact` solves the field equations;
// the other two reproduce the formula as originally printed (phase
// kappa = beta*g1 + g2/beta, and the variant with g1 in the second slot of
// D's tanh).  They exist for the comparative residual report and are never
// used by the evolution code.
enum class SolitonForm { exact, printed_phase, printed_phase_gamma1 };

// Phase kappa = a*gamma1 + b*gamma2 used by a given form.
struct PhaseCoefficients {
    double a = 0.0;
    double b = 0.0;
};

constexpr double arcosh_clamp_tol = 1e-12;
constexpr double den_floor = 1e-14;

DerivedConstants derive_constants(double mu);
PhaseCoefficients soliton_phase_coefficients(const DerivedConstants& dc, SolitonForm form);

void validate(const SolitonParams& p);

Background eval_background(const SolitonParams& p, double t, double x);

SolitonSample eval_soliton(const SolitonParams& p, double t, double x);
SolitonSample eval_soliton(const SolitonParams& p, const DerivedConstants& dc, double t, double x);

// Asymptotic constant state (gamma1 = lambda, gamma2 = 0); bitwise equal to
// eval_soliton anywhere outside both bump supports.
SolitonSample far_field(const SolitonParams& p);

struct SolitonValues {
    double B = 0.0;
    double D = 0.0;
};

// B and D only, for any form (used by the residual comparison).
SolitonValues soliton_values(const SolitonParams& p, double t, double x, SolitonForm form);

std::string to_string(SolitonForm form);

} // namespace pcf
