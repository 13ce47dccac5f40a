#pragma once

#include <cmath>
#include <string>

#include "sta/errors.hpp"
#include "sta/fourier.hpp"
#include "sta/protocol.hpp"
#include "sta/quadratic.hpp"
#include "sta/units.hpp"
#include "sta/wavefunction.hpp"

namespace sta {

/// Coefficient of the counterdiabatic correction H1 = -c(t) (x p + p x),
/// c(t) = omega_dot / (4 omega). Singular where omega vanishes.
struct CounterdiabaticTerm {
    double coefficient = 0.0;
};

struct SqueezeParameter {
    double r = 0.0;
};

inline CounterdiabaticTerm h1_term(const FrequencyProtocol& protocol, double t)
{
    const double w2 = protocol.omega_sq(t);
    if (!(w2 > 0.0))
        throw InvalidInput("h1_term: counterdiabatic term undefined, omega^2 = " +
                           std::to_string(w2) + " at t = " + std::to_string(t));
    return {protocol.omega_dot(t) / (4.0 * std::sqrt(w2))};
}

/// r(t) = ln sqrt(omega(t)/omega(0)).
inline SqueezeParameter squeeze_parameter(const FrequencyProtocol& protocol, double t)
{
    const double wt = protocol.omega(t); // throws on omega^2 <= 0
    return {0.5 * std::log(wt / protocol.omega0())};
}

/// S(r) = exp{(r/2)(a^2 - a+^2)} acting in coordinate representation:
/// (S psi)(x) = e^{r/2} psi(e^r x). With r = ln sqrt(omega_t/omega_0) this
/// maps every omega_0 eigenstate onto the matching omega_t eigenstate.
inline Wavefunction apply_squeeze(SqueezeParameter r, const Wavefunction& psi,
                                  SpectralWorkspace& ws)
{
    if (!std::isfinite(r.r)) throw InvalidInput("apply_squeeze: r must be finite");
    if (!(ws.grid() == psi.grid()))
        throw InvalidInput("apply_squeeze: workspace grid mismatch");
    Eigen::VectorXcd amps = psi.values();
    ws.scale_coordinates(amps, r.r);
    const double n2 = amps.squaredNorm() * psi.grid().dx();
    if (std::abs(n2 - 1.0) > 1e-9)
        throw InvalidInput("apply_squeeze: rescaled support leaves the grid (norm error " +
                           std::to_string(n2 - 1.0) + ")");
    return Wavefunction(psi.grid(), std::move(amps));
}

inline Wavefunction apply_squeeze(SqueezeParameter r, const Wavefunction& psi)
{
    SpectralWorkspace ws(psi.grid());
    return apply_squeeze(r, psi, ws);
}

enum class PhaseChoice {
    WithH0, // H = H0 + H1: instantaneous eigenstates carry the dynamical phase
    Bare    // H = H1 only: the simplest phase choice, E_n(t) dropped
};

inline QuadraticHamiltonian tt_hamiltonian(const FrequencyProtocol& protocol, double t,
                                           PhaseChoice phase, const UnitSystem& units = {})
{
    check_units(units);
    const double c = h1_term(protocol, t).coefficient;
    if (phase == PhaseChoice::Bare) return {0.0, 0.0, -c};
    const double m = units.mass;
    return {1.0 / (2.0 * m), 0.5 * m * protocol.omega_sq(t), -c};
}

} // namespace sta
