#pragma once

#include <vector>

namespace pcf {

struct Grid1D {
    double x_min = -10.0;
    double dx = 1.0 / 32.0;
    int n = 641;
    double cfl = 0.45;
    int guard_width = 4;

    double x(int i) const { return x_min + i * dx; }
    double x_max() const { return x_min + (n - 1) * dx; }
    double dt() const { return cfl * dx; }

    // Interior bounds excluding the guard band.
    double inner_min() const { return x_min + guard_width * dx; }
    double inner_max() const { return x_max() - guard_width * dx; }

    void validate() const;

    bool operator==(const Grid1D&) const = default;
};

// Grid covering [x_lo, x_hi] (rounded outward to whole cells).
Grid1D make_grid(double x_lo, double x_hi, double dx, double cfl = 0.45, int guard_width = 4);

// 3-point centered first derivative, one-sided second order at both ends.
void d0(const std::vector<double>& f, double dx, std::vector<double>& out);
std::vector<double> d0(const std::vector<double>& f, double dx);

// Second derivative as D0 applied twice.
std::vector<double> d0d0(const std::vector<double>& f, double dx);

// Trapezoid rule on the uniform grid, fixed left-to-right summation order.
double trapezoid(const std::vector<double>& f, double dx);

} // namespace pcf
