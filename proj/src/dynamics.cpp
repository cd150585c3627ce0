#include "pcf/dynamics.hpp"

#include "pcf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcf {

NullDerivatives null_derivatives(const std::vector<double>& f_t, const std::vector<double>& f_x) {
    NullDerivatives nd;
    nd.L.resize(f_t.size());
    nd.Lbar.resize(f_t.size());
    for (std::size_t i = 0; i < f_t.size(); ++i) {
        nd.L[i] = f_t[i] + f_x[i];
        nd.Lbar[i] = f_t[i] - f_x[i];
    }
    return nd;
}

SolitonField sample_soliton(const SolitonParams& p, const Grid1D& grid, double t) {
    const DerivedConstants dc = derive_constants(p.mu);
    const std::size_t n = static_cast<std::size_t>(grid.n);
    SolitonField f;
    f.time = t;
    for (auto* a : {&f.B, &f.D, &f.B_t, &f.B_x, &f.D_t, &f.D_x, &f.boxB, &f.boxD}) a->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SolitonSample s = eval_soliton(p, dc, t, grid.x(static_cast<int>(i)));
        f.B[i] = s.B;
        f.D[i] = s.D;
        f.B_t[i] = s.B_t;
        f.B_x[i] = s.B_x;
        f.D_t[i] = s.D_t;
        f.D_x[i] = s.D_x;
        f.boxB[i] = s.boxB;
        f.boxD[i] = s.boxD;
    }
    return f;
}

FarField far_field_of(const SolitonParams& p) {
    const SolitonSample s = far_field(p);
    return {s.B, s.D};
}

namespace {

void require_size(const std::vector<double>& v, const Grid1D& grid) {
    if (v.size() != static_cast<std::size_t>(grid.n)) throw DomainError("state size does not match grid");
}

void zero_ends(std::vector<double>& v) {
    v.front() = 0.0;
    v.back() = 0.0;
}

} // namespace

Accelerations rhs_full(const FullState& st, const Grid1D& grid, double lambda_floor) {
    for (const auto* f : st.fields()) require_size(*f, grid);
    const std::size_t n = st.lambda.size();
    double lam_min = st.lambda[0];
    for (double l : st.lambda) lam_min = std::min(lam_min, std::abs(l));
    if (lam_min < lambda_floor)
        throw CoefficientSingularity("min |Lambda| = " + std::to_string(lam_min) + " below lambda_floor");

    const std::vector<double> lx = d0(st.lambda, grid.dx);
    const std::vector<double> px = d0(st.phi, grid.dx);
    const std::vector<double> lxx = d0(lx, grid.dx);

    std::vector<double> sh2(n), flux(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sh = std::sinh(st.lambda[i]);
        sh2[i] = sh * sh;
        flux[i] = sh2[i] * px[i];
    }
    const std::vector<double> dflux = d0(flux, grid.dx);

    Accelerations a;
    a.first.resize(n);
    a.second.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double L = st.lambda[i];
        const double coth = std::cosh(L) / std::sinh(L);
        a.first[i] = lxx[i] - 2.0 * std::sinh(2.0 * L) * (px[i] * px[i] - st.psi[i] * st.psi[i]);
        a.second[i] = dflux[i] / sh2[i] - 2.0 * coth * st.pi[i] * st.psi[i];
    }
    zero_ends(a.first);
    zero_ends(a.second);
    return a;
}

namespace {

void check_field(const PerturbationState& st, const Grid1D& grid, const SolitonField& field, double lambda_floor) {
    for (const auto* f : st.fields()) require_size(*f, grid);
    require_size(field.B, grid);
    double m = field.B[0] + st.z[0];
    for (std::size_t i = 0; i < st.z.size(); ++i) m = std::min(m, field.B[i] + st.z[i]);
    if (m < lambda_floor) throw CoefficientSingularity("min(B+z) = " + std::to_string(m) + " below lambda_floor");
}

} // namespace

Accelerations rhs_perturbation(const PerturbationState& st, const Grid1D& grid, const SolitonField& f,
                               double lambda_floor) {
    check_field(st, grid, f, lambda_floor);
    const std::size_t n = st.z.size();
    const std::vector<double> zx = d0(st.z, grid.dx);
    const std::vector<double> sx = d0(st.s, grid.dx);
    const std::vector<double> zxx = d0(zx, grid.dx);
    const std::vector<double> sxx = d0(sx, grid.dx);

    Accelerations a;
    a.first.resize(n);
    a.second.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double B = f.B[i], L = B + st.z[i];
        const double Dt = f.D_t[i], Dx = f.D_x[i], Bt = f.B_t[i], Bx = f.B_x[i];
        const double w = st.w[i], m = st.m[i];

        const double qDD = q0(Dt, Dx, Dt, Dx);
        const double qDs = q0(Dt, Dx, m, sx[i]);
        const double qss = q0(m, sx[i], m, sx[i]);
        const double box_z = 2.0 * std::sinh(2.0 * B) * qDD - 2.0 * std::sinh(2.0 * L) * (qDD + 2.0 * qDs + qss);

        const double cothB = std::cosh(B) / std::sinh(B);
        const double cothL = std::cosh(L) / std::sinh(L);
        const double qDB = q0(Dt, Dx, Bt, Bx);
        const double box_s = -2.0 * cothB * qDB + 2.0 * cothL * (qDB + q0(Dt, Dx, w, zx[i]) + q0(Bt, Bx, m, sx[i]) +
                                                                 q0(w, zx[i], m, sx[i]));
        a.first[i] = zxx[i] + box_z;
        a.second[i] = sxx[i] + box_s;
    }
    zero_ends(a.first);
    zero_ends(a.second);
    return a;
}

Accelerations rhs_perturbation(const PerturbationState& st, const Grid1D& grid, double lambda_floor) {
    return rhs_perturbation(st, grid, sample_soliton(st.params, grid, st.time), lambda_floor);
}

Accelerations rhs_perturbation_expanded(const PerturbationState& st, const Grid1D& grid, const SolitonField& f,
                                        double lambda_floor) {
    check_field(st, grid, f, lambda_floor);
    const std::size_t n = st.z.size();
    const std::vector<double> zx = d0(st.z, grid.dx);
    const std::vector<double> sx = d0(st.s, grid.dx);
    const std::vector<double> zxx = d0(zx, grid.dx);
    const std::vector<double> sxx = d0(sx, grid.dx);

    Accelerations a;
    a.first.resize(n);
    a.second.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double B = f.B[i], z = st.z[i], L = B + z;
        const double Dt = f.D_t[i], Dx = f.D_x[i], Bt = f.B_t[i], Bx = f.B_x[i];
        const double w = st.w[i], m = st.m[i], zxi = zx[i], sxi = sx[i];
        const double shz = std::sinh(z);

        const double box_z = -2.0 * std::sinh(2.0 * L) * (2.0 * Dx * sxi - 2.0 * Dt * m + sxi * sxi - m * m) -
                             2.0 * (2.0 * std::sinh(2.0 * B) * shz * shz + std::sinh(2.0 * z) * std::cosh(2.0 * B)) *
                                 (Dx * Dx - Dt * Dt);
        const double shL = std::sinh(L), shB = std::sinh(B);
        const double ratio_L = std::sinh(2.0 * L) / (shL * shL);
        const double ratio_B = std::sinh(2.0 * B) / (shB * shB);
        const double box_s = -ratio_L * (Dt * w - Dx * zxi + Bt * m - Bx * sxi + w * m - sxi * zxi) +
                             (ratio_B - ratio_L) * (Dt * Bt - Dx * Bx);
        a.first[i] = zxx[i] + box_z;
        a.second[i] = sxx[i] + box_s;
    }
    zero_ends(a.first);
    zero_ends(a.second);
    return a;
}

SolitonCache::SolitonCache(const SolitonParams& params, const Grid1D& grid) : params_(params), grid_(grid) {}

const SolitonField& SolitonCache::at(double t) {
    for (int k = 0; k < 3; ++k)
        if (valid_[k] && slots_[k].time == t) return slots_[k];
    const int k = next_;
    next_ = (next_ + 1) % 3;
    slots_[k] = sample_soliton(params_, grid_, t);
    valid_[k] = true;
    return slots_[k];
}

namespace {

using Derivative = std::array<std::vector<double>, 4>;

// Classical RK4 on the first-order system (u, u_t, v, v_t).
template <class State, class Rhs>
State rk4(const State& y0, double h, Rhs&& rhs) {
    auto deriv = [&](const State& y, double t) {
        Accelerations a = rhs(y, t);
        const auto f = y.fields();
        Derivative k{*f[1], std::move(a.first), *f[3], std::move(a.second)};
        for (auto& v : k) zero_ends(v);
        return k;
    };
    auto shifted = [&](const Derivative& k, double c) {
        State y = y0;
        y.time = y0.time + c;
        auto dst = y.fields();
        for (int j = 0; j < 4; ++j) {
            std::vector<double>& d = *dst[j];
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += c * k[j][i];
        }
        return y;
    };

    const double t = y0.time;
    const Derivative k1 = deriv(y0, t);
    const Derivative k2 = deriv(shifted(k1, 0.5 * h), t + 0.5 * h);
    const Derivative k3 = deriv(shifted(k2, 0.5 * h), t + 0.5 * h);
    const Derivative k4 = deriv(shifted(k3, h), t + h);

    State y = y0;
    y.time = t + h;
    auto dst = y.fields();
    const double c = h / 6.0;
    for (int j = 0; j < 4; ++j) {
        std::vector<double>& d = *dst[j];
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] += c * (k1[j][i] + 2.0 * k2[j][i] + 2.0 * k3[j][i] + k4[j][i]);
    }
    return y;
}

template <class State>
void check_finite(const State& y) {
    for (const auto* f : y.fields())
        for (double v : *f)
            if (!std::isfinite(v)) throw BlowupDetected("non-finite field value after step");
}

template <class Fn>
void for_guard(const Grid1D& grid, Fn&& fn) {
    const int g = std::min(grid.guard_width, grid.n);
    for (int i = 0; i < g; ++i) fn(i);
    for (int i = std::max(g, grid.n - g); i < grid.n; ++i) fn(i);
}

} // namespace

void check_guard_band(const FullState& st, const Grid1D& grid, const FarField& far, double tol) {
    for_guard(grid, [&](int i) {
        const double dev = std::max({std::abs(st.lambda[i] - far.lambda), std::abs(st.phi[i] - far.phi),
                                     std::abs(st.pi[i]), std::abs(st.psi[i])});
        if (dev > tol)
            throw BoundaryContamination("guard band deviation " + std::to_string(dev) + " at x=" +
                                        std::to_string(grid.x(i)));
    });
}

void check_guard_band(const PerturbationState& st, const Grid1D& grid, double tol) {
    for_guard(grid, [&](int i) {
        const double dev = std::max({std::abs(st.z[i]), std::abs(st.w[i]), std::abs(st.s[i]), std::abs(st.m[i])});
        if (dev > tol)
            throw BoundaryContamination("guard band deviation " + std::to_string(dev) + " at x=" +
                                        std::to_string(grid.x(i)));
    });
}

FullState step(const FullState& state, const Grid1D& grid, double h, const FarField& far, const StepOptions& opts) {
    FullState y = rk4(state, h, [&](const FullState& s, double) { return rhs_full(s, grid, opts.lambda_floor); });
    check_finite(y);
    check_guard_band(y, grid, far, opts.boundary_tol);
    return y;
}

PerturbationState step(const PerturbationState& state, const Grid1D& grid, double h, SolitonCache& cache,
                       const StepOptions& opts) {
    PerturbationState y = rk4(state, h, [&](const PerturbationState& s, double t) {
        return rhs_perturbation(s, grid, cache.at(t), opts.lambda_floor);
    });
    check_finite(y);
    check_guard_band(y, grid, opts.boundary_tol);
    return y;
}

InitialData build_initial_data(const SolitonParams& params, const PerturbationBumps& bumps, double delta_scale,
                               const Grid1D& grid) {
    validate(params);
    grid.validate();
    for (const BumpSpec* b : {&bumps.z0, &bumps.w0, &bumps.s0, &bumps.m0}) validate(*b);
    if (!(delta_scale >= 0.0) || !std::isfinite(delta_scale)) throw DomainError("delta_scale must be >= 0");

    auto check_support = [&](const BumpSpec& b, const char* name) {
        if (!b.active()) return;
        if (b.support_min() < grid.inner_min() || b.support_max() > grid.inner_max())
            throw SupportError(std::string("support of ") + name + " intrudes on the guard band");
    };
    if (params.epsilon > 0.0) {
        check_support(params.theta, "theta");
        check_support(params.sigma, "sigma");
    }
    if (delta_scale > 0.0) {
        check_support(bumps.z0, "z0");
        check_support(bumps.w0, "w0");
        check_support(bumps.s0, "s0");
        check_support(bumps.m0, "m0");
    }

    const SolitonField sol = sample_soliton(params, grid, 0.0);
    const std::size_t n = static_cast<std::size_t>(grid.n);
    InitialData d;
    d.perturbation.params = params;
    for (auto* v : d.full.fields()) v->resize(n);
    for (auto* v : d.perturbation.fields()) v->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(static_cast<int>(i));
        const double z = delta_scale * bump_eval(bumps.z0, x).value;
        const double w = delta_scale * bump_eval(bumps.w0, x).value;
        const double s = delta_scale * bump_eval(bumps.s0, x).value;
        const double m = delta_scale * bump_eval(bumps.m0, x).value;
        d.perturbation.z[i] = z;
        d.perturbation.w[i] = w;
        d.perturbation.s[i] = s;
        d.perturbation.m[i] = m;
        d.full.lambda[i] = sol.B[i] + z;
        d.full.pi[i] = sol.B_t[i] + w;
        d.full.phi[i] = sol.D[i] + s;
        d.full.psi[i] = sol.D_t[i] + m;
    }
    return d;
}

PerturbationState perturbation_from_full(const FullState& st, const SolitonParams& params,
                                         const SolitonField& f) {
    PerturbationState p;
    p.time = st.time;
    p.params = params;
    const std::size_t n = st.lambda.size();
    for (auto* v : p.fields()) v->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.z[i] = st.lambda[i] - f.B[i];
        p.w[i] = st.pi[i] - f.B_t[i];
        p.s[i] = st.phi[i] - f.D[i];
        p.m[i] = st.psi[i] - f.D_t[i];
    }
    return p;
}

} // namespace pcf
