#pragma once

#include <string>

namespace pcf {

enum class BumpFamily { quartic_cosine, cubic_polynomial };

// Compactly supported C^2 profile.  amplitude = 0 means "absent".
struct BumpSpec {
    BumpFamily family = BumpFamily::quartic_cosine;
    double center = 0.0;
    double half_width = 1.0;
    double amplitude = 0.0;

    double support_min() const { return center - half_width; }
    double support_max() const { return center + half_width; }
    bool active() const { return amplitude != 0.0; }

    bool operator==(const BumpSpec&) const = default;
};

struct BumpValue {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

void validate(const BumpSpec& spec);

// Value and first two derivatives; exact zeros outside the open support.
BumpValue bump_eval(const BumpSpec& spec, double xi);

std::string to_string(BumpFamily family);
BumpFamily bump_family_from_string(const std::string& name);

} // namespace pcf
