#include "pcf/soliton.hpp"

#include "pcf/errors.hpp"

#include <cmath>
#include <numbers>

namespace pcf {

DerivedConstants derive_constants(double mu) {
    if (!(mu > 0.0 && mu < 1.0))
        throw DomainError("mu must lie in (0, 1) for the nonsingular soliton, got " + std::to_string(mu));
    DerivedConstants dc;
    const double ratio = 2.0 * mu / (mu * mu - 1.0);
    dc.c = ratio * ratio;
    dc.sqrt_c = -ratio;  // positive on (0,1)
    dc.v = -(mu * mu + 1.0) / (2.0 * mu);
    dc.beta = (mu + 1.0) / (mu - 1.0);
    dc.x0 = std::log(std::abs(mu)) / dc.sqrt_c;
    return dc;
}

PhaseCoefficients soliton_phase_coefficients(const DerivedConstants& dc, SolitonForm form) {
    // The printed phase beta*g1 + g2/beta does not solve the system; flipping
    // the sign of both coefficients does (residual drops from O(eps^2) to
    // round-off).  All of f1, f2, g1, g2 inherit the same coefficients.
    if (form == SolitonForm::exact) return {-dc.beta, -1.0 / dc.beta};
    return {dc.beta, 1.0 / dc.beta};
}

void validate(const SolitonParams& p) {
    derive_constants(p.mu);
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) throw DomainError("lambda must be positive");
    if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon)) throw DomainError("epsilon must be >= 0");
    validate(p.theta);
    validate(p.sigma);
}

Background eval_background(const SolitonParams& p, double t, double x) {
    Background g;
    g.gamma1 = p.lambda + p.epsilon * bump_eval(p.theta, x + t).value;
    g.gamma2 = p.epsilon * bump_eval(p.sigma, x - t).value;
    g.gamma = g.gamma1 + g.gamma2;
    return g;
}

namespace {

struct Core {
    double B, D;
    double A, kappa, tk, tg, sech_k, sech_g, Y;
};

Core soliton_core(const DerivedConstants& dc, const PhaseCoefficients& pc, double g1, double g2,
                  SolitonForm form) {
    Core r{};
    const double g = g1 + g2;
    const double s = 1.0 / dc.sqrt_c;
    const double vsc = dc.v * dc.sqrt_c;
    r.kappa = pc.a * g1 + pc.b * g2;
    const double chk = std::cosh(r.kappa);
    const double chg = std::cosh(g);
    const double shg = std::sinh(g);
    r.tk = std::tanh(r.kappa);
    r.tg = std::tanh(g);
    r.sech_k = 1.0 / chk;
    r.sech_g = 1.0 / chg;

    r.A = std::abs(dc.v) * chg - s * r.tk * shg;
    if (r.A < 1.0) {
        if (r.A < 1.0 - arcosh_clamp_tol)
            throw NumericalDomainError("arcosh argument " + std::to_string(r.A) + " below 1");
        r.A = 1.0;
    }
    r.B = std::acosh(r.A);

    const double tk_inner = form == SolitonForm::printed_phase_gamma1 ? std::tanh((pc.a + pc.b) * g1) : r.tk;
    r.Y = chk * chg * (tk_inner + vsc * r.tg);
    r.D = std::numbers::pi / 4.0 - 0.5 * std::atan(r.Y);
    return r;
}

} // namespace

SolitonSample eval_soliton(const SolitonParams& p, const DerivedConstants& dc, double t, double x) {
    const BumpValue th = bump_eval(p.theta, x + t);
    const BumpValue si = bump_eval(p.sigma, x - t);
    SolitonSample o;
    o.gamma1 = p.lambda + p.epsilon * th.value;
    o.gamma2 = p.epsilon * si.value;
    o.gamma = o.gamma1 + o.gamma2;

    const PhaseCoefficients pc = soliton_phase_coefficients(dc, SolitonForm::exact);
    const Core k = soliton_core(dc, pc, o.gamma1, o.gamma2, SolitonForm::exact);
    o.B = k.B;
    o.D = k.D;

    const double isc = 1.0 / dc.sqrt_c;
    const double vsc = dc.v * dc.sqrt_c;
    const double sk2 = k.sech_k * k.sech_k;

    const double f1 = std::abs(dc.v) * k.tg - pc.a * isc * sk2 * k.tg - isc * k.tk;
    const double f2 = std::abs(dc.v) * k.tg - pc.b * isc * sk2 * k.tg - isc * k.tk;
    const double f3 = k.sech_g * std::sqrt(k.A * k.A - 1.0);
    const double g1 = pc.a + vsc + (1.0 + pc.a * vsc) * k.tk * k.tg;
    const double g2 = pc.b + vsc + (1.0 + pc.b * vsc) * k.tk * k.tg;
    const double g3 = 2.0 * k.sech_k * k.sech_g * (k.Y * k.Y + 1.0);

    if (std::abs(f3) < den_floor) throw SingularDenominator("f3 below den_floor (B too close to 0)");
    if (std::abs(g3) < den_floor) throw SingularDenominator("g3 below den_floor");

    const double lt = p.epsilon * th.d1;  // eps * theta'
    const double rt = p.epsilon * si.d1;  // eps * sigma'
    o.B_t = (lt * f1 - rt * f2) / f3;
    o.B_x = (lt * f1 + rt * f2) / f3;
    o.D_t = -(lt * g1 - rt * g2) / g3;
    o.D_x = -(lt * g1 + rt * g2) / g3;

    o.boxB = -2.0 * std::sinh(2.0 * o.B) * (o.D_x * o.D_x - o.D_t * o.D_t);
    o.boxD = -2.0 * (std::cosh(o.B) / std::sinh(o.B)) * (o.D_t * o.B_t - o.D_x * o.B_x);
    return o;
}

SolitonSample eval_soliton(const SolitonParams& p, double t, double x) {
    return eval_soliton(p, derive_constants(p.mu), t, x);
}

SolitonSample far_field(const SolitonParams& p) {
    SolitonParams flat = p;
    flat.theta.amplitude = 0.0;
    flat.sigma.amplitude = 0.0;
    return eval_soliton(flat, 0.0, 0.0);
}

SolitonValues soliton_values(const SolitonParams& p, double t, double x, SolitonForm form) {
    const DerivedConstants dc = derive_constants(p.mu);
    const Background g = eval_background(p, t, x);
    const Core k = soliton_core(dc, soliton_phase_coefficients(dc, form), g.gamma1, g.gamma2, form);
    return {k.B, k.D};
}

std::string to_string(SolitonForm form) {
    switch (form) {
    case SolitonForm::exact: return "exact";
    case SolitonForm::printed_phase: return "printed_phase";
    case SolitonForm::printed_phase_gamma1: return "printed_phase_gamma1";
    }
    return "?";
}

} // namespace pcf
