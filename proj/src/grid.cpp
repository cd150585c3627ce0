#include "pcf/grid.hpp"

#include "pcf/errors.hpp"

#include <cmath>

namespace pcf {

void Grid1D::validate() const {
    if (!(dx > 0.0) || !std::isfinite(dx)) throw DomainError("grid dx must be positive");
    if (n < 16) throw DomainError("grid needs n >= 16 points");
    if (!(cfl > 0.0 && cfl <= 0.9)) throw DomainError("cfl must lie in (0, 0.9]");
    if (guard_width < 4) throw DomainError("guard_width must be >= 4 cells");
    if (2 * guard_width + 3 > n) throw DomainError("grid too small for its guard band");
    if (!std::isfinite(x_min)) throw DomainError("grid x_min must be finite");
}

Grid1D make_grid(double x_lo, double x_hi, double dx, double cfl, int guard_width) {
    Grid1D g;
    g.x_min = x_lo;
    g.dx = dx;
    g.n = static_cast<int>(std::ceil((x_hi - x_lo) / dx - 1e-9)) + 1;
    g.cfl = cfl;
    g.guard_width = guard_width;
    return g;
}

void d0(const std::vector<double>& f, double dx, std::vector<double>& out) {
    const std::size_t n = f.size();
    out.resize(n);
    const double inv = 1.0 / (2.0 * dx);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv;
    // one-sided second order, written in differences so constants give exactly 0
    out[0] = (3.0 * (f[1] - f[0]) - (f[2] - f[1])) * inv;
    out[n - 1] = (3.0 * (f[n - 1] - f[n - 2]) - (f[n - 2] - f[n - 3])) * inv;
}

std::vector<double> d0(const std::vector<double>& f, double dx) {
    std::vector<double> out;
    d0(f, dx, out);
    return out;
}

std::vector<double> d0d0(const std::vector<double>& f, double dx) {
    return d0(d0(f, dx), dx);
}

double trapezoid(const std::vector<double>& f, double dx) {
    if (f.empty()) return 0.0;
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
    return sum * dx;
}

} // namespace pcf
