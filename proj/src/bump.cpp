#include "pcf/bump.hpp"

#include "pcf/errors.hpp"

#include <cmath>
#include <numbers>

namespace pcf {

void validate(const BumpSpec& spec) {
    if (!(spec.half_width > 0.0) || !std::isfinite(spec.half_width))
        throw DomainError("bump half_width must be positive and finite");
    if (!std::isfinite(spec.center) || !std::isfinite(spec.amplitude))
        throw DomainError("bump center/amplitude must be finite");
}

BumpValue bump_eval(const BumpSpec& spec, double xi) {
    const double h = spec.half_width;
    const double s = (xi - spec.center) / h;
    if (!(std::abs(s) < 1.0)) return {};

    const double A = spec.amplitude;
    if (spec.family == BumpFamily::quartic_cosine) {
        // A cos^4(k (xi - c)),  k = pi / (2h)
        const double k = std::numbers::pi / (2.0 * h);
        const double c = std::cos(k * (xi - spec.center));
        const double sn = std::sin(k * (xi - spec.center));
        const double c2 = c * c;
        return {A * c2 * c2,
                -4.0 * A * k * c2 * c * sn,
                4.0 * A * k * k * c2 * (3.0 * sn * sn - c2)};
    }
    // A (1 - s^2)^3
    const double q = 1.0 - s * s;
    return {A * q * q * q,
            -6.0 * A * s * q * q / h,
            -6.0 * A * q * (1.0 - 5.0 * s * s) / (h * h)};
}

std::string to_string(BumpFamily family) {
    return family == BumpFamily::quartic_cosine ? "quartic-cosine" : "cubic-polynomial";
}

BumpFamily bump_family_from_string(const std::string& name) {
    if (name == "quartic-cosine") return BumpFamily::quartic_cosine;
    if (name == "cubic-polynomial") return BumpFamily::cubic_polynomial;
    throw ConfigError("unknown bump family '" + name + "' (expected quartic-cosine or cubic-polynomial)");
}

} // namespace pcf
