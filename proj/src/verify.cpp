#include "pcf/verify.hpp"

#include "pcf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pcf {

bool ConvergenceReport::all_zero() const {
    return std::all_of(errors.begin(), errors.end(), [](double e) { return e == 0.0; });
}

std::vector<double> ConvergenceReport::reduction_factors() const {
    std::vector<double> r;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) r.push_back(errors[i] / errors[i + 1]);
    return r;
}

double fit_order(const std::vector<double>& res, const std::vector<double>& err) {
    if (res.size() != err.size() || res.size() < 2) throw DomainError("order fit needs >= 2 paired samples");
    for (double e : err)
        if (!(e > 0.0) || !std::isfinite(e)) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(res.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        const double x = std::log(res[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

ConvergenceReport make_report(std::string name, std::vector<double> res, std::vector<double> err) {
    ConvergenceReport r;
    r.name = std::move(name);
    r.fitted_order = fit_order(res, err);
    r.resolutions = std::move(res);
    r.errors = std::move(err);
    return r;
}

// Spacetime point where the left-moving theta profile meets the
// right-moving sigma profile (clamped to t >= 0).
std::pair<double, double> interaction_point(const SolitonParams& p) {
    const double xs = 0.5 * (p.theta.center + p.sigma.center);
    const double ts = 0.5 * (p.theta.center - p.sigma.center);
    return {std::max(ts, 0.0), xs};
}

} // namespace

ConvergenceReport soliton_pde_residual(const SolitonParams& params, const std::vector<double>& hs, SolitonForm form) {
    validate(params);
    const auto [tc, xc] = interaction_point(params);
    auto val = [&](double t, double x) { return soliton_values(params, t, x, form); };

    std::vector<double> errs;
    for (double h : hs) {
        double worst = 0.0;
        for (int a = 0; a <= 8; ++a) {
            for (int b = -12; b <= 12; ++b) {
                const double t = tc + a / 8.0, x = xc + b / 8.0;
                const SolitonValues c = val(t, x);
                const SolitonValues tp = val(t + h, x), tm = val(t - h, x);
                const SolitonValues xp = val(t, x + h), xm = val(t, x - h);
                const double Bt = (tp.B - tm.B) / (2 * h), Bx = (xp.B - xm.B) / (2 * h);
                const double Dt = (tp.D - tm.D) / (2 * h), Dx = (xp.D - xm.D) / (2 * h);
                const double boxB = (tp.B - 2 * c.B + tm.B) / (h * h) - (xp.B - 2 * c.B + xm.B) / (h * h);
                const double boxD = (tp.D - 2 * c.D + tm.D) / (h * h) - (xp.D - 2 * c.D + xm.D) / (h * h);
                const double r1 = boxB + 2.0 * std::sinh(2.0 * c.B) * (Dx * Dx - Dt * Dt);
                const double r2 = boxD + 2.0 * (std::cosh(c.B) / std::sinh(c.B)) * (Dt * Bt - Dx * Bx);
                worst = std::max({worst, std::abs(r1), std::abs(r2)});
            }
        }
        errs.push_back(worst);
    }
    return make_report("soliton_pde_residual[" + to_string(form) + "]", hs, errs);
}

std::vector<std::pair<double, double>> random_interaction_points(const SolitonParams& params, int count,
                                                                 unsigned seed, double margin) {
    const auto [tc, xc] = interaction_point(params);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(tc, tc + 1.0), ux(xc - 1.5, xc + 1.5);
    auto near_edge = [&](const BumpSpec& b, double xi) {
        return std::abs(std::abs(xi - b.center) - b.half_width) < margin;
    };
    std::vector<std::pair<double, double>> pts;
    while (static_cast<int>(pts.size()) < count) {
        const double t = ut(rng), x = ux(rng);
        if (near_edge(params.theta, x + t) || near_edge(params.sigma, x - t)) continue;
        pts.emplace_back(t, x);
    }
    return pts;
}

ConvergenceReport derivative_formula_check(const SolitonParams& params,
                                           const std::vector<std::pair<double, double>>& points,
                                           const std::vector<double>& hs) {
    validate(params);
    const DerivedConstants dc = derive_constants(params.mu);
    std::vector<double> errs;
    for (double h : hs) {
        double worst = 0.0;
        for (const auto& [t, x] : points) {
            const SolitonSample s = eval_soliton(params, dc, t, x);
            const SolitonSample tp = eval_soliton(params, dc, t + h, x), tm = eval_soliton(params, dc, t - h, x);
            const SolitonSample xp = eval_soliton(params, dc, t, x + h), xm = eval_soliton(params, dc, t, x - h);
            worst = std::max({worst, std::abs(s.B_t - (tp.B - tm.B) / (2 * h)),
                              std::abs(s.B_x - (xp.B - xm.B) / (2 * h)), std::abs(s.D_t - (tp.D - tm.D) / (2 * h)),
                              std::abs(s.D_x - (xp.D - xm.D) / (2 * h))});
        }
        errs.push_back(worst);
    }
    return make_report("derivative_formula_check", hs, errs);
}

namespace {

struct ModeRun {
    Grid1D grid;
    InitialData data;
};

ModeRun prepare(const ModeConsistencySetup& s, double dx) {
    ModeRun r{make_grid(s.x_lo, s.x_hi, dx, s.cfl), {}};
    r.data = build_initial_data(s.params, s.bumps, s.delta_scale, r.grid);
    return r;
}

double level_discrepancy(const FullState& y, const PerturbationState& q, const SolitonField& f) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < y.lambda.size(); ++i) {
        a = std::max(a, std::abs(y.lambda[i] - (f.B[i] + q.z[i])));
        b = std::max(b, std::abs(y.phi[i] - (f.D[i] + q.s[i])));
    }
    return a + b;
}

} // namespace

ModeConsistencySetup auto_domain_setup(const SolitonParams& params, const PerturbationBumps& bumps, double delta_scale,
                                       double t_end, const StepOptions& step) {
    ModeConsistencySetup s;
    s.params = params;
    s.bumps = bumps;
    s.delta_scale = delta_scale;
    s.t_end = t_end;
    s.step = step;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    auto include = [&](const BumpSpec& b) {
        if (!b.active()) return;
        lo = any ? std::min(lo, b.support_min()) : b.support_min();
        hi = any ? std::max(hi, b.support_max()) : b.support_max();
        any = true;
    };
    if (params.epsilon > 0.0) {
        include(params.theta);
        include(params.sigma);
    }
    if (delta_scale > 0.0)
        for (const BumpSpec* b : {&bumps.z0, &bumps.w0, &bumps.s0, &bumps.m0}) include(*b);
    // light cone through t_end plus a margin for the guard band
    const double pad = t_end + 3.0;
    s.x_lo = (any ? lo : -5.0) - pad;
    s.x_hi = (any ? hi : 5.0) + pad;
    return s;
}

double mode_discrepancy(const ModeConsistencySetup& s, double dx) {
    ModeRun r = prepare(s, dx);
    const Grid1D& g = r.grid;
    const FarField far = far_field_of(s.params);
    SolitonCache cache(s.params, g);
    FullState y = r.data.full;
    PerturbationState q = r.data.perturbation;
    double worst = level_discrepancy(y, q, cache.at(q.time));
    const double dt = g.dt();
    for (double h = next_step_size(q.time, s.t_end, dt); h > 0.0; h = next_step_size(q.time, s.t_end, dt)) {
        y = step(y, g, h, far, s.step);
        q = step(q, g, h, cache, s.step);
        worst = std::max(worst, level_discrepancy(y, q, cache.at(q.time)));
    }
    return worst;
}

ConvergenceReport mode_consistency(const ModeConsistencySetup& s, const std::vector<double>& dxs) {
    std::vector<double> errs;
    for (double dx : dxs) errs.push_back(mode_discrepancy(s, dx));
    return make_report("mode_consistency", dxs, errs);
}

FreeWaveResult free_wave_oracle(const FreeWaveSetup& s, const std::vector<double>& dxs) {
    std::vector<double> terr, eerr;
    double phi_drift = 0.0;
    for (double dx : dxs) {
        const Grid1D g = make_grid(s.x_lo, s.x_hi, dx, s.cfl);
        FullState y;
        for (auto* v : y.fields()) v->assign(static_cast<std::size_t>(g.n), 0.0);
        for (int i = 0; i < g.n; ++i) {
            const BumpValue b = bump_eval(s.packet, g.x(i));
            const auto k = static_cast<std::size_t>(i);
            y.lambda[k] = s.lambda_far + b.value;
            y.pi[k] = b.d1;
            y.phi[k] = s.phi_far;
        }
        const FarField far{s.lambda_far, s.phi_far};
        const double E0 = trapezoid(densities_full(y, g).e, g.dx);
        const double dt = g.dt();
        for (double h = next_step_size(y.time, s.t_end, dt); h > 0.0; h = next_step_size(y.time, s.t_end, dt))
            y = step(y, g, h, far);
        const double E1 = trapezoid(densities_full(y, g).e, g.dx);
        double worst = 0.0;
        for (int i = 0; i < g.n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double exact = s.lambda_far + bump_eval(s.packet, g.x(i) + y.time).value;
            worst = std::max(worst, std::abs(y.lambda[k] - exact));
            phi_drift = std::max(phi_drift, std::abs(y.phi[k] - s.phi_far));
        }
        terr.push_back(worst);
        eerr.push_back(std::abs(E1 - E0) / E0);
    }
    FreeWaveResult r;
    r.translation = make_report("free_wave_translation", dxs, terr);
    r.energy = make_report("free_wave_energy", dxs, eerr);
    r.max_phi_drift = phi_drift;
    return r;
}

VirialConvergence virial_convergence(const ModeConsistencySetup& s, double t_eval, const std::vector<double>& dxs) {
    std::vector<double> errs, eerr, perr;
    double gap = 0.0;
    for (double dx : dxs) {
        ModeRun r = prepare(s, dx);
        const Grid1D& g = r.grid;
        SolitonCache cache(s.params, g);
        const double dt = g.dt();
        PerturbationState prev, cur = r.data.perturbation;
        SolitonField fprev, fcur = cache.at(cur.time);
        for (double h = next_step_size(cur.time, t_eval, dt); h > 0.0; h = next_step_size(cur.time, t_eval, dt)) {
            prev = cur;
            fprev = fcur;
            cur = step(cur, g, h, cache, s.step);
            if (std::abs(cur.time - t_eval) <= 1e-9 * dt) cur.time = t_eval;
            fcur = cache.at(cur.time);
        }
        if (prev.z.empty()) throw InsufficientHistory("virial convergence needs t_eval > 0");
        const PerturbationState next = step(cur, g, dt, cache, s.step);
        const SolitonField fnext = cache.at(next.time);
        TrajectoryWindow w;
        w.levels = {&prev, &cur, &next};
        w.fields = {&fprev, &fcur, &fnext};
        w.eval_index = 1;
        const VirialReport vr = virial_report(w, g, VirialCutoffs::unit());
        errs.push_back(vr.max_norm());
        eerr.push_back(vr.e_max);
        perr.push_back(vr.p_max);
        gap = std::max({gap, std::abs(vr.integrated_e - vr.reduced_e), std::abs(vr.integrated_p - vr.reduced_p)});
    }
    VirialConvergence out;
    out.combined = make_report("virial_residual", dxs, errs);
    out.energy = make_report("virial_residual[energy]", dxs, eerr);
    out.momentum = make_report("virial_residual[momentum]", dxs, perr);
    out.identity_gap = gap;
    return out;
}

} // namespace pcf
