#include "pcf/diagnostics.hpp"

#include "pcf/dynamics.hpp"
#include "pcf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pcf {

DensityFields densities_full(const FullState& st, const Grid1D& grid) {
    const std::size_t n = st.lambda.size();
    const std::vector<double> lx = d0(st.lambda, grid.dx);
    const std::vector<double> px = d0(st.phi, grid.dx);
    DensityFields d;
    d.e.resize(n);
    d.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sh = std::sinh(st.lambda[i]);
        const double S = sh * sh;
        d.e[i] = 0.5 * (lx[i] * lx[i] + st.pi[i] * st.pi[i]) + 2.0 * S * (px[i] * px[i] + st.psi[i] * st.psi[i]);
        d.p[i] = lx[i] * st.pi[i] + 4.0 * S * px[i] * st.psi[i];
    }
    return d;
}

DensityFields densities_perturbation(const PerturbationState& st, const Grid1D& grid, const SolitonField& f) {
    const std::size_t n = st.z.size();
    const std::vector<double> zx = d0(st.z, grid.dx);
    const std::vector<double> sx = d0(st.s, grid.dx);
    DensityFields d;
    for (auto* v : {&d.e, &d.p, &d.ehat, &d.phat, &d.Fe, &d.Fp}) v->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double L = f.B[i] + st.z[i];
        const double shL = std::sinh(L);
        const double S = shL * shL;
        const double sh2 = std::sinh(2.0 * L);
        const double w = st.w[i], m = st.m[i], zxi = zx[i], sxi = sx[i];
        const double Bt = f.B_t[i], Bx = f.B_x[i], Dt = f.D_t[i], Dx = f.D_x[i];

        const double Lx = Bx + zxi, Lt = Bt + w, Px = Dx + sxi, Pt = Dt + m;
        d.e[i] = 0.5 * (Lx * Lx + Lt * Lt) + 2.0 * S * (Px * Px + Pt * Pt);
        d.p[i] = Lx * Lt + 4.0 * S * Px * Pt;

        d.ehat[i] = 0.5 * (w * w + zxi * zxi) + 2.0 * S * (sxi * sxi + m * m);
        d.phat[i] = zxi * w + 4.0 * S * sxi * m;

        // B_xx - B_tt = -boxB, D_xx - D_tt = -boxD
        const double mboxB = -f.boxB[i], mboxD = -f.boxD[i];
        const double tail = 2.0 * sh2 * (sxi * sxi - m * m);
        d.Fe[i] = w * mboxB + 4.0 * S * m * mboxD +
                  2.0 * sh2 * (m * (2.0 * Bx * Dx - 2.0 * Dt * Bt + 2.0 * zxi * Dx) +
                               w * (Dt * Dt - Dx * Dx - 2.0 * sxi * Dx)) +
                  tail * Bt;
        d.Fp[i] = zxi * mboxB + 4.0 * S * sxi * mboxD +
                  2.0 * sh2 * (zxi * (Dt * Dt - Dx * Dx + 2.0 * m * Dt) + 2.0 * sxi * (Bx * Dx - Bt * Dt - w * Dt)) +
                  tail * Bx;
    }
    return d;
}

void virial_sources_printed(const PerturbationState& st, const Grid1D& grid, const SolitonField& f,
                            std::vector<double>& Fe, std::vector<double>& Fp) {
    const std::size_t n = st.z.size();
    const std::vector<double> zx = d0(st.z, grid.dx);
    const std::vector<double> sx = d0(st.s, grid.dx);
    Fe.resize(n);
    Fp.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double L = f.B[i] + st.z[i];
        const double shL = std::sinh(L);
        const double S = shL * shL;
        const double sh2 = std::sinh(2.0 * L);
        const double w = st.w[i], m = st.m[i], zxi = zx[i], sxi = sx[i];
        const double Bt = f.B_t[i], Bx = f.B_x[i], Dt = f.D_t[i], Dx = f.D_x[i];
        const double boxB = f.boxB[i], mboxD = -f.boxD[i];
        Fp[i] = zxi * boxB + 4.0 * S * sxi * mboxD +
                2.0 * sh2 * (zxi * (Dt * Dt - Dx * Dx + 2.0 * m * Dt) +
                             2.0 * sxi * (Bx * Dx - Bt * Dx - Bt * Dt - w * Dt)) +
                2.0 * sh2 * (sxi * sxi - m * m) * Bx;
        Fe[i] = -w * boxB + 4.0 * S * m * mboxD +
                2.0 * sh2 * (m * (2.0 * Bx * Dx - 2.0 * Dt * Bt + 2.0 * zxi * Dx) +
                             w * (Dt * Dt - Dx * Dx - 2.0 * sxi * Dx));
    }
}

namespace {

double crossed_density(double zx, double w, double sx, double m, double L) {
    const double sh = std::sinh(L);
    const double a = zx - w, b = sx - m;
    return 0.5 * a * a + 2.0 * sh * sh * b * b;
}

double crossed_integral(const PerturbationState& st, const Grid1D& grid, const SolitonField& f) {
    const std::vector<double> zx = d0(st.z, grid.dx);
    const std::vector<double> sx = d0(st.s, grid.dx);
    std::vector<double> c(st.z.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = crossed_density(zx[i], st.w[i], sx[i], st.m[i], f.B[i] + st.z[i]);
    return trapezoid(c, grid.dx);
}

} // namespace

Totals totals(const FullState& st, const Grid1D& grid, const SolitonField& f) {
    const DensityFields d = densities_full(st, grid);
    const PerturbationState p = perturbation_from_full(st, SolitonParams{}, f);
    Totals t;
    t.E_total = trapezoid(d.e, grid.dx);
    t.P_total = trapezoid(d.p, grid.dx);
    t.crossed = crossed_integral(p, grid, f);
    t.ehat_total = trapezoid(densities_perturbation(p, grid, f).ehat, grid.dx);
    return t;
}

Totals totals(const PerturbationState& st, const Grid1D& grid, const SolitonField& f) {
    const DensityFields d = densities_perturbation(st, grid, f);
    Totals t;
    t.E_total = trapezoid(d.e, grid.dx);
    t.P_total = trapezoid(d.p, grid.dx);
    t.crossed = crossed_integral(st, grid, f);
    t.ehat_total = trapezoid(d.ehat, grid.dx);
    return t;
}

namespace {

// Trapezoid weight of node i on the full grid.
double node_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

} // namespace

ExteriorEnergy exterior_energy(const PerturbationState& st, const Grid1D& grid, const SolitonField& f, double R) {
    if (!(R > 0.0)) throw DomainError("exterior radius R must be positive");
    const DensityFields d = densities_perturbation(st, grid, f);
    const double t = st.time;
    ExteriorEnergy out;
    bool any = false;
    double sum = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        if (x + t <= -R || x - t >= R) {
            any = true;
            sum += node_weight(i, grid.n) * d.ehat[static_cast<std::size_t>(i)];
        }
    }
    out.value = sum * grid.dx;
    out.empty_region = !any;
    return out;
}

double window_width(double t) {
    if (!(t > 1.0)) throw WindowUndefined("window width t/log^2 t needs t > 1, got t=" + std::to_string(t));
    const double l = std::log(t);
    return t / (l * l);
}

double window_energy(const PerturbationState& st, const Grid1D& grid, const SolitonField& f, double v) {
    if (!(std::abs(v) < 1.0)) throw DomainError("window speed must satisfy |v| < 1");
    if (!(st.time >= window_t_min))
        throw WindowUndefined("window energy needs t >= 8, got t=" + std::to_string(st.time));
    const double om = window_width(st.time);
    const double lo = v * st.time - om, hi = v * st.time + om;
    const std::vector<double> zx = d0(st.z, grid.dx);
    const std::vector<double> sx = d0(st.s, grid.dx);
    std::vector<double> vals;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        if (x < lo || x > hi) continue;
        const auto k = static_cast<std::size_t>(i);
        const double sh = std::sinh(f.B[k] + st.z[k]);
        vals.push_back(st.w[k] * st.w[k] + zx[k] * zx[k] + sh * sh * (st.m[k] * st.m[k] + sx[k] * sx[k]));
    }
    return vals.size() < 2 ? 0.0 : trapezoid(vals, grid.dx);
}

void validate_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0 / 3.0))
        throw DomainError("eta must satisfy 0 < eta < 1/3 (weight (1+u^2)^(1+eta)), got " + std::to_string(eta));
}

double weight(double u, double eta) {
    validate_eta(eta);
    return std::pow(1.0 + u * u, 1.0 + eta);
}

NullIntegrands null_integrands(const PerturbationState& st, const Grid1D& grid) {
    NullIntegrands out;
    const std::vector<double>* fs[2][2] = {{&st.z, &st.w}, {&st.s, &st.m}};
    for (int f = 0; f < 2; ++f) {
        const std::vector<double>& u = *fs[f][0];
        const std::vector<double>& ut = *fs[f][1];
        const std::vector<double> ux = d0(u, grid.dx);
        const std::vector<double> uxx = d0(ux, grid.dx);
        const std::vector<double> utx = d0(ut, grid.dx);
        const std::vector<double>* t_parts[2] = {&ut, &utx};
        const std::vector<double>* x_parts[2] = {&ux, &uxx};
        for (int k = 0; k < 2; ++k) {
            const NullDerivatives nd = null_derivatives(*t_parts[k], *x_parts[k]);
            auto& lb = out.Lbar2[f * 2 + k];
            auto& l = out.L2[f * 2 + k];
            lb.resize(u.size());
            l.resize(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                lb[i] = nd.Lbar[i] * nd.Lbar[i];
                l[i] = nd.L[i] * nd.L[i];
            }
        }
    }
    return out;
}

WeightedNorms weighted_norms(const PerturbationState& st, const Grid1D& grid, double eta) {
    validate_eta(eta);
    const NullIntegrands in = null_integrands(st, grid);
    const std::size_t n = st.z.size();
    std::vector<double> wu(n), wub(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(static_cast<int>(i));
        wu[i] = weight(0.5 * (st.time - x), eta);
        wub[i] = weight(0.5 * (st.time + x), eta);
    }
    double vals[4];
    std::vector<double> integrand(n);
    for (int j = 0; j < 4; ++j) {
        for (std::size_t i = 0; i < n; ++i) integrand[i] = wu[i] * in.Lbar2[j][i] + wub[i] * in.L2[j][i];
        vals[j] = trapezoid(integrand, grid.dx);
    }
    WeightedNorms out;
    out.eta = eta;
    out.E0 = vals[0];
    out.E1 = vals[1];
    out.Ebar0 = vals[2];
    out.Ebar1 = vals[3];
    return out;
}

FluxAccumulator::FluxAccumulator(const Grid1D& grid, double eta, double t0, int stride)
    : grid_(grid), eta_(eta), t0_(t0), t_prev_(t0) {
    validate_eta(eta);
    if (stride < 1) throw DomainError("flux line stride must be >= 1");
    for (int i = 0; i < grid.n; i += stride) {
        left_.push_back(Line{grid.x(i)});
        right_.push_back(Line{grid.x(i)});
    }
}

void FluxAccumulator::sample(const NullIntegrands& in, double t, Line& line, bool left, double out[4]) const {
    const double x = left ? line.x0 - (t - t0_) : line.x0 + (t - t0_);
    const double pos = (x - grid_.x_min) / grid_.dx;
    if (pos < 0.0 || pos > grid_.n - 1) {
        line.alive = false;
        return;
    }
    const int i = std::min(static_cast<int>(pos), grid_.n - 2);
    const double a = pos - i;
    const double wgt = left ? weight(0.5 * (t - x), eta_) : weight(0.5 * (t + x), eta_);
    for (int j = 0; j < 4; ++j) {
        const std::vector<double>& f = left ? in.Lbar2[j] : in.L2[j];
        out[j] = wgt * ((1.0 - a) * f[static_cast<std::size_t>(i)] + a * f[static_cast<std::size_t>(i) + 1]);
    }
}

void FluxAccumulator::start(const PerturbationState& st) {
    const NullIntegrands in = null_integrands(st, grid_);
    t_prev_ = st.time;
    for (Line& l : left_) sample(in, st.time, l, true, l.prev);
    for (Line& l : right_) sample(in, st.time, l, false, l.prev);
    started_ = true;
}

void FluxAccumulator::advance(const PerturbationState& st) {
    if (!started_) throw InsufficientHistory("flux accumulator advanced before start");
    const NullIntegrands in = null_integrands(st, grid_);
    const double h = st.time - t_prev_;
    auto update = [&](std::vector<Line>& lines, bool left) {
        for (Line& l : lines) {
            if (!l.alive) continue;
            double cur[4];
            sample(in, st.time, l, left, cur);
            if (!l.alive) continue;
            for (int j = 0; j < 4; ++j) {
                l.integral[j] += 0.5 * h * (l.prev[j] + cur[j]);
                l.prev[j] = cur[j];
            }
        }
    };
    update(left_, true);
    update(right_, false);
    t_prev_ = st.time;
}

void FluxAccumulator::fill(WeightedNorms& norms) const {
    double sup_left[4] = {0, 0, 0, 0}, sup_right[4] = {0, 0, 0, 0};
    for (const Line& l : left_)
        for (int j = 0; j < 4; ++j) sup_left[j] = std::max(sup_left[j], l.integral[j]);
    for (const Line& l : right_)
        for (int j = 0; j < 4; ++j) sup_right[j] = std::max(sup_right[j], l.integral[j]);
    norms.F0 = sup_left[0] + sup_right[0];
    norms.F1 = sup_left[1] + sup_right[1];
    norms.Fbar0 = sup_left[2] + sup_right[2];
    norms.Fbar1 = sup_left[3] + sup_right[3];
}

double weighted_initial_norm(const PerturbationState& st, const Grid1D& grid, double eta, double x_scale) {
    validate_eta(eta);
    const double dx = grid.dx;
    const std::vector<double> zx = d0(st.z, dx), sx = d0(st.s, dx);
    const std::vector<double> zxx = d0(zx, dx), sxx = d0(sx, dx);
    const std::vector<double> wx = d0(st.w, dx), mx = d0(st.m, dx);
    std::vector<double> f(st.z.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = grid.x(static_cast<int>(i)) / x_scale;
        const double k0 = st.w[i] * st.w[i] + zx[i] * zx[i] + st.m[i] * st.m[i] + sx[i] * sx[i];
        const double k1 = wx[i] * wx[i] + zxx[i] * zxx[i] + mx[i] * mx[i] + sxx[i] * sxx[i];
        f[i] = std::pow(1.0 + x * x, 1.0 + eta) * (k0 + k1);
    }
    return trapezoid(f, dx);
}

double Cutoff::value(double s) const {
    if (constant_one) return 1.0;
    const double xi = std::clamp((s - (center - 0.5 * width)) / width, 0.0, 1.0);
    const double y = std::numbers::pi * (xi - 0.5);
    const double P = (3.0 * y / 8.0 + std::sin(2.0 * y) / 4.0 + std::sin(4.0 * y) / 32.0 + 3.0 * std::numbers::pi / 16.0) /
                     (3.0 * std::numbers::pi / 8.0);
    return rising ? P : 1.0 - P;
}

double Cutoff::derivative(double s) const {
    if (constant_one) return 0.0;
    const double xi = (s - (center - 0.5 * width)) / width;
    if (xi <= 0.0 || xi >= 1.0) return 0.0;
    const double c = std::cos(std::numbers::pi * (xi - 0.5));
    const double d = 8.0 / (3.0 * width) * c * c * c * c;
    return rising ? d : -d;
}

VirialCutoffs VirialCutoffs::unit(double r) {
    VirialCutoffs c;
    c.chi1.constant_one = true;
    c.chi2.constant_one = true;
    c.r = r;
    return c;
}

VirialCutoffs VirialCutoffs::diamond(double R, double width, double r) {
    VirialCutoffs c;
    c.chi1 = Cutoff{R + 0.5 * width, width, false, false};
    c.chi2 = Cutoff{-R - 0.5 * width, width, true, false};
    c.r = r;
    return c;
}

double VirialReport::max_norm() const { return std::max(e_max, p_max); }
double VirialReport::l2_norm() const { return std::hypot(e_l2, p_l2); }

VirialReport virial_report(const TrajectoryWindow& win, const Grid1D& grid, const VirialCutoffs& cut) {
    if (win.levels.size() < 3 || win.fields.size() < 3)
        throw InsufficientHistory("virial residuals need three consecutive time levels");
    const std::size_t j = win.eval_index;
    if (j > 2) throw DomainError("eval_index must be 0, 1 or 2");

    double t[3];
    DensityFields dens[3];
    for (int k = 0; k < 3; ++k) {
        t[k] = win.levels[k]->time;
        dens[k] = densities_perturbation(*win.levels[k], grid, *win.fields[k]);
    }
    // derivative weights of the quadratic interpolant at t[j]
    double c[3];
    for (int k = 0; k < 3; ++k) {
        const int a = (k + 1) % 3, b = (k + 2) % 3;
        c[k] = ((t[j] - t[a]) + (t[j] - t[b])) / ((t[k] - t[a]) * (t[k] - t[b]));
    }

    const std::size_t n = dens[0].ehat.size();
    const DensityFields& dj = dens[j];
    const std::vector<double> phat_x = d0(dj.phat, grid.dx);
    const std::vector<double> ehat_x = d0(dj.ehat, grid.dx);

    VirialReport out;
    std::vector<double> re(n), rp(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double et = c[0] * dens[0].ehat[i] + c[1] * dens[1].ehat[i] + c[2] * dens[2].ehat[i];
        const double pt = c[0] * dens[0].phat[i] + c[1] * dens[1].phat[i] + c[2] * dens[2].phat[i];
        re[i] = et - phat_x[i] - dj.Fe[i];
        rp[i] = pt - ehat_x[i] - dj.Fp[i];
        out.e_max = std::max(out.e_max, std::abs(re[i]));
        out.p_max = std::max(out.p_max, std::abs(rp[i]));
        re[i] *= re[i];
        rp[i] *= rp[i];
    }
    out.e_l2 = std::sqrt(trapezoid(re, grid.dx));
    out.p_l2 = std::sqrt(trapezoid(rp, grid.dx));

    // weighted integrals at every level, transport terms at level j
    double Ie[3], Ip[3], Ue[3], Up[3];
    std::vector<double> tmp_e(n), tmp_p(n);
    for (int k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.x(static_cast<int>(i));
            const double chi = cut.chi1.value(x + cut.r * t[k]) * cut.chi2.value(x - cut.r * t[k]);
            tmp_e[i] = dens[k].ehat[i] * chi;
            tmp_p[i] = dens[k].phat[i] * chi;
        }
        Ie[k] = trapezoid(tmp_e, grid.dx);
        Ip[k] = trapezoid(tmp_p, grid.dx);
        Ue[k] = trapezoid(dens[k].ehat, grid.dx);
        Up[k] = trapezoid(dens[k].phat, grid.dx);
    }
    std::vector<double> rhs_e(n), rhs_p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(static_cast<int>(i));
        const double s1 = x + cut.r * t[j], s2 = x - cut.r * t[j];
        const double c1 = cut.chi1.value(s1), c2 = cut.chi2.value(s2);
        const double d1 = cut.chi1.derivative(s1), d2 = cut.chi2.derivative(s2);
        const double minus = d1 * c2 - c1 * d2, plus = d1 * c2 + c1 * d2;
        rhs_e[i] = cut.r * dj.ehat[i] * minus - dj.phat[i] * plus + dj.Fe[i] * c1 * c2;
        rhs_p[i] = cut.r * dj.phat[i] * minus - dj.ehat[i] * plus + dj.Fp[i] * c1 * c2;
    }
    const double dIe = c[0] * Ie[0] + c[1] * Ie[1] + c[2] * Ie[2];
    const double dIp = c[0] * Ip[0] + c[1] * Ip[1] + c[2] * Ip[2];
    out.integrated_e = dIe - trapezoid(rhs_e, grid.dx);
    out.integrated_p = dIp - trapezoid(rhs_p, grid.dx);
    out.reduced_e = (c[0] * Ue[0] + c[1] * Ue[1] + c[2] * Ue[2]) - trapezoid(dj.Fe, grid.dx);
    out.reduced_p = (c[0] * Up[0] + c[1] * Up[1] + c[2] * Up[2]) - trapezoid(dj.Fp, grid.dx);
    return out;
}

double DecayRatios::max() const { return std::max({Lz, Lbar_z, Ls, Lbar_s}); }

DecayRatios pointwise_decay_monitor(const PerturbationState& st, const Grid1D& grid, double eta, double delta) {
    validate_eta(eta);
    if (!(delta > 0.0)) throw DomainError("decay monitor needs delta > 0");
    const std::vector<double> zx = d0(st.z, grid.dx), sx = d0(st.s, grid.dx);
    DecayRatios r;
    const double pw = 0.5 * (1.0 + eta);
    for (int i = 0; i < grid.n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double x = grid.x(i);
        const double u = 0.5 * (st.time - x), ub = 0.5 * (st.time + x);
        const double wu = std::pow(1.0 + u * u, pw), wub = std::pow(1.0 + ub * ub, pw);
        r.Lz = std::max(r.Lz, std::abs(st.w[k] + zx[k]) * wub / delta);
        r.Lbar_z = std::max(r.Lbar_z, std::abs(st.w[k] - zx[k]) * wu / delta);
        r.Ls = std::max(r.Ls, std::abs(st.m[k] + sx[k]) * wub / delta);
        r.Lbar_s = std::max(r.Lbar_s, std::abs(st.m[k] - sx[k]) * wu / delta);
    }
    return r;
}

SinhBounds sinh_bounds_monitor(const PerturbationState& st, const Grid1D& grid, const SolitonField& f) {
    (void)grid;
    SinhBounds b;
    b.sinh_min = b.cosh_min = std::numeric_limits<double>::infinity();
    b.sinh_max = b.cosh_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.z.size(); ++i) {
        const double L = f.B[i] + st.z[i];
        const double sh = std::sinh(L), ch = std::cosh(L);
        b.sinh_min = std::min(b.sinh_min, sh);
        b.sinh_max = std::max(b.sinh_max, sh);
        b.cosh_min = std::min(b.cosh_min, ch);
        b.cosh_max = std::max(b.cosh_max, ch);
    }
    return b;
}

} // namespace pcf
