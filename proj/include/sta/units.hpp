#pragma once

#include <cmath>

#include "sta/errors.hpp"

namespace sta {

// hbar and the oscillator mass. The numerical core runs in dimensionless
// units (both default to 1); SI scaling belongs at the I/O boundary.
struct UnitSystem {
    double hbar = 1.0;
    double mass = 1.0;
};

inline void check_units(const UnitSystem& u)
{
    if (!(u.hbar > 0.0) || !std::isfinite(u.hbar))
        throw InvalidInput("units: hbar must be positive");
    if (!(u.mass > 0.0) || !std::isfinite(u.mass))
        throw InvalidInput("units: mass must be positive");
}

} // namespace sta
