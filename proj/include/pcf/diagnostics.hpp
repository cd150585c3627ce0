#pragma once

#include "pcf/grid.hpp"
#include "pcf/state.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace pcf {

struct DensityFields {
    std::vector<double> e, p;                // full energy / momentum densities
    std::vector<double> ehat, phat, Fe, Fp;  // perturbation densities and virial sources
};

DensityFields densities_full(const FullState& state, const Grid1D& grid);

// Full densities of (B+z, ...) plus the perturbation densities and sources.
DensityFields densities_perturbation(const PerturbationState& state, const Grid1D& grid, const SolitonField& field);

// The two source expressions as originally printed (kept for comparison;
// they fail the local balance laws, see verify).
void virial_sources_printed(const PerturbationState& state, const Grid1D& grid, const SolitonField& field,
                            std::vector<double>& Fe, std::vector<double>& Fp);

struct Totals {
    double E_total = 0.0;
    double P_total = 0.0;
    double crossed = 0.0;      // integral of 1/2 (z_x - w)^2 + 2 sinh^2(B+z) (s_x - m)^2
    double ehat_total = 0.0;   // integral of ehat
};

Totals totals(const FullState& state, const Grid1D& grid, const SolitonField& field);
Totals totals(const PerturbationState& state, const Grid1D& grid, const SolitonField& field);

struct ExteriorEnergy {
    double value = 0.0;
    bool empty_region = false;
};

// Energy of the perturbation outside the backward cone: x + t <= -R or x - t >= R.
ExteriorEnergy exterior_energy(const PerturbationState& state, const Grid1D& grid, const SolitonField& field,
                               double R);

constexpr double window_t_min = 8.0;

// t / log^2 t; WindowUndefined for t <= 1.
double window_width(double t);

// WindowUndefined below window_t_min.
// Integral of w^2 + z_x^2 + sinh^2(B+z)(m^2 + s_x^2) over [vt - w(t), vt + w(t)].
double window_energy(const PerturbationState& state, const Grid1D& grid, const SolitonField& field, double v);

// (1 + u^2)^(1 + eta); DomainError unless 0 < eta < 1/3.
double weight(double u, double eta);
void validate_eta(double eta);

struct WeightedNorms {
    double E0 = 0.0, E1 = 0.0, Ebar0 = 0.0, Ebar1 = 0.0;
    double F0 = 0.0, F1 = 0.0, Fbar0 = 0.0, Fbar1 = 0.0;
    double eta = 0.25;

    double surface_total() const { return E0 + E1 + Ebar0 + Ebar1; }
};

// Pointwise integrands |Lbar d^k f|^2 and |L d^k f|^2 for f in {z, s}, k in {0, 1}.
struct NullIntegrands {
    // index: [field*2 + k], field 0 = z, 1 = s
    std::vector<double> Lbar2[4];
    std::vector<double> L2[4];
};

NullIntegrands null_integrands(const PerturbationState& state, const Grid1D& grid);

// Surface norms only (F entries zero); the flux parts come from FluxAccumulator.
WeightedNorms weighted_norms(const PerturbationState& state, const Grid1D& grid, double eta);

// Line integrals along characteristics through every `stride`-th node,
// accumulated step by step with linear interpolation and the trapezoid rule.
class FluxAccumulator {
public:
    FluxAccumulator(const Grid1D& grid, double eta, double t0, int stride = 4);

    void start(const PerturbationState& state);  // record integrands at t0
    void advance(const PerturbationState& state);  // state at the next time level
    void fill(WeightedNorms& norms) const;

private:
    struct Line {
        double x0;
        bool alive = true;
        double prev[4] = {0, 0, 0, 0};
        double integral[4] = {0, 0, 0, 0};
    };

    void sample(const NullIntegrands& in, double t, Line& line, bool left, double out[4]) const;

    Grid1D grid_;
    double eta_;
    double t0_;
    double t_prev_;
    std::vector<Line> left_, right_;
    bool started_ = false;
};

// Sum over k = 0,1 of the integral of (1+(x/x_scale)^2)^(1+eta) times
// (d^k w)^2 + (d^{k+1} z)^2 + (d^k m)^2 + (d^{k+1} s)^2.  x_scale = 1 is the
// admissibility norm of the initial data.
double weighted_initial_norm(const PerturbationState& state, const Grid1D& grid, double eta, double x_scale = 1.0);

// Smooth monotone transition built from the normalized integral of cos^4.
struct Cutoff {
    double center = 0.0;
    double width = 1.0;
    bool rising = true;
    bool constant_one = false;

    double value(double s) const;
    double derivative(double s) const;
};

struct VirialCutoffs {
    Cutoff chi1;  // non-increasing, argument x + r t
    Cutoff chi2;  // non-decreasing, argument x - r t
    double r = 1.0;

    // chi1 = chi2 = 1.
    static VirialCutoffs unit(double r = 1.0);
    // chi1 drops to 0 over [R, R+w], chi2 rises from 0 over [-R-w, -R]:
    // their product localizes to the shrinking diamond |x| + r t <~ R.
    static VirialCutoffs diamond(double R, double width = 1.0, double r = 1.0);
};

struct VirialReport {
    double e_max = 0.0, e_l2 = 0.0;  // d_t ehat - d_x phat - Fe
    double p_max = 0.0, p_l2 = 0.0;  // d_t phat - d_x ehat - Fp
    double integrated_e = 0.0, integrated_p = 0.0;  // weighted integral identities
    double reduced_e = 0.0, reduced_p = 0.0;        // d/dt of plain integrals minus source integrals

    double max_norm() const;
    double l2_norm() const;
};

// Three consecutive time levels; `eval_index` picks the level at which the
// residuals are formed (Lagrange differentiation on the actual times).
struct TrajectoryWindow {
    std::vector<const PerturbationState*> levels;
    std::vector<const SolitonField*> fields;
    std::size_t eval_index = 1;
};

VirialReport virial_report(const TrajectoryWindow& window, const Grid1D& grid, const VirialCutoffs& cutoffs);

struct DecayRatios {
    double Lz = 0.0, Lbar_z = 0.0, Ls = 0.0, Lbar_s = 0.0;
    double max() const;
};

DecayRatios pointwise_decay_monitor(const PerturbationState& state, const Grid1D& grid, double eta, double delta);

struct SinhBounds {
    double sinh_min = 0.0, sinh_max = 0.0, cosh_min = 0.0, cosh_max = 0.0;
};

SinhBounds sinh_bounds_monitor(const PerturbationState& state, const Grid1D& grid, const SolitonField& field);

struct DiagnosticsRecord {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    double t = 0.0;
    double E_total = 0.0;
    double P_total = 0.0;
    double crossed = 0.0;
    double exterior_R = 0.0;
    double window_v = nan;
    WeightedNorms norms;
    double virial_max = nan;
    double virial_l2 = nan;
    double decay_ratio = 0.0;
    SinhBounds sinh_bounds;

    double ehat_total = 0.0;  // not part of the CSV schema
    bool exterior_empty = false;
};

} // namespace pcf
