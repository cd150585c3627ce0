#pragma once

#include "pcf/grid.hpp"
#include "pcf/soliton.hpp"

#include <array>
#include <vector>

namespace pcf {

// (Lambda, Lambda_t, phi, phi_t) on the grid.
struct FullState {
    double time = 0.0;
    std::vector<double> lambda, pi, phi, psi;

    std::array<std::vector<double>*, 4> fields() { return {&lambda, &pi, &phi, &psi}; }
    std::array<const std::vector<double>*, 4> fields() const { return {&lambda, &pi, &phi, &psi}; }
};

// Perturbation (z, z_t, s, s_t) of the soliton described by `params`.
struct PerturbationState {
    double time = 0.0;
    SolitonParams params;
    std::vector<double> z, w, s, m;

    std::array<std::vector<double>*, 4> fields() { return {&z, &w, &s, &m}; }
    std::array<const std::vector<double>*, 4> fields() const { return {&z, &w, &s, &m}; }
};

// L f = f_t + f_x,  Lbar f = f_t - f_x.
struct NullDerivatives {
    std::vector<double> L, Lbar;
};

NullDerivatives null_derivatives(const std::vector<double>& f_t, const std::vector<double>& f_x);

// Closed-form soliton sampled on a grid at one time (structure of arrays).
struct SolitonField {
    double time = 0.0;
    std::vector<double> B, D, B_t, B_x, D_t, D_x, boxB, boxD;
};

SolitonField sample_soliton(const SolitonParams& p, const Grid1D& grid, double t);

} // namespace pcf
