#pragma once

#include "pcf/grid.hpp"
#include "pcf/soliton.hpp"
#include "pcf/state.hpp"

#include <array>
#include <vector>

namespace pcf {

// Minkowski null form a_x b_x - a_t b_t.
inline double q0(double at, double ax, double bt, double bx) { return ax * bx - at * bt; }

struct Accelerations {
    std::vector<double> first;   // Lambda_tt or z_tt
    std::vector<double> second;  // phi_tt or s_tt
};

struct StepOptions {
    double lambda_floor = 0.05;
    double boundary_tol = 1e-10;
};

// Asymptotic values the full fields relax to at both ends of the domain.
struct FarField {
    double lambda = 1.0;
    double phi = 0.0;
};

FarField far_field_of(const SolitonParams& p);

// Full system.  Lambda_xx = D0(D0 Lambda); the phi equation is taken in
// divergence form D0(sinh^2 * D0 phi)/sinh^2, which makes the trapezoid
// energy an exact invariant of the semi-discrete flow.
Accelerations rhs_full(const FullState& state, const Grid1D& grid, double lambda_floor = 0.05);

// Perturbation system in null-form notation.  `field` must be sampled at
// state.time on the same grid.
Accelerations rhs_perturbation(const PerturbationState& state, const Grid1D& grid, const SolitonField& field,
                               double lambda_floor = 0.05);
Accelerations rhs_perturbation(const PerturbationState& state, const Grid1D& grid, double lambda_floor = 0.05);

// Same system written with the sinh/cosh expansion; kept as an independent
// cross-check of the null-form version.
Accelerations rhs_perturbation_expanded(const PerturbationState& state, const Grid1D& grid,
                                        const SolitonField& field, double lambda_floor = 0.05);

// Memoizes soliton samples for the last few stage times of a run.
class SolitonCache {
public:
    SolitonCache(const SolitonParams& params, const Grid1D& grid);
    const SolitonField& at(double t);

private:
    SolitonParams params_;
    Grid1D grid_;
    std::array<SolitonField, 3> slots_;
    std::array<bool, 3> valid_{};
    int next_ = 0;
};

// One classical RK4 step of size h.  Boundary nodes are held fixed.
FullState step(const FullState& state, const Grid1D& grid, double h, const FarField& far,
               const StepOptions& opts = {});
PerturbationState step(const PerturbationState& state, const Grid1D& grid, double h, SolitonCache& cache,
                       const StepOptions& opts = {});

// Guard-band checks used after every step.
void check_guard_band(const FullState& state, const Grid1D& grid, const FarField& far, double tol);
void check_guard_band(const PerturbationState& state, const Grid1D& grid, double tol);

struct PerturbationBumps {
    BumpSpec z0, w0, s0, m0;
    bool operator==(const PerturbationBumps&) const = default;
};

struct InitialData {
    FullState full;
    PerturbationState perturbation;
};

// Full = soliton + delta * bumps at t = 0; perturbation = delta * bumps.
InitialData build_initial_data(const SolitonParams& params, const PerturbationBumps& bumps, double delta_scale,
                               const Grid1D& grid);

// Subtracts the closed-form soliton from a full state.
PerturbationState perturbation_from_full(const FullState& state, const SolitonParams& params,
                                         const SolitonField& field);

} // namespace pcf
