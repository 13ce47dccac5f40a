#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "sta/errors.hpp"
#include "sta/fourier.hpp"
#include "sta/units.hpp"
#include "sta/wavefunction.hpp"

namespace sta {

/// Snapshot of a generalized harmonic oscillator
///   H = kinetic * p^2 + potential * x^2 + cross * (x p + p x).
/// `potential` may be negative (expulsive parabola); `kinetic` must not be.
struct QuadraticHamiltonian {
    double kinetic = 0.0;
    double potential = 0.0;
    double cross = 0.0;

    static QuadraticHamiltonian oscillator(double omega, const UnitSystem& u)
    {
        return {1.0 / (2.0 * u.mass), 0.5 * u.mass * omega * omega, 0.0};
    }
};

inline void check_hamiltonian(const QuadraticHamiltonian& h)
{
    if (!(h.kinetic >= 0.0) || !std::isfinite(h.potential) || !std::isfinite(h.cross))
        throw InvalidInput("quadratic hamiltonian: kinetic coefficient must be >= 0 and finite");
}

/// <k(omega)| d/dt |n(omega)> for the instantaneous oscillator eigenbasis:
///   +(1/4) sqrt(n(n-1))     * wdot/w   for k = n-2,
///   -(1/4) sqrt((n+1)(n+2)) * wdot/w   for k = n+2,
///   0 otherwise.
inline double dt_matrix_element(int k, int n, double omega, double omega_dot)
{
    if (k < 0 || n < 0) throw InvalidInput("dt_matrix_element: indices must be >= 0");
    if (!(omega > 0.0)) throw InvalidInput("dt_matrix_element: omega must be positive");
    const double ratio = omega_dot / omega;
    if (k == n - 2) return 0.25 * std::sqrt(double(n) * (n - 1.0)) * ratio;
    if (k == n + 2) return -0.25 * std::sqrt((n + 1.0) * (n + 2.0)) * ratio;
    return 0.0;
}

/// H psi as raw amplitudes (not normalized; it is an operator application).
/// Momentum acts spectrally; the symmetrized cross term is x(p psi) + p(x psi).
inline Eigen::VectorXcd apply_quadratic(const QuadraticHamiltonian& h, const SpatialGrid& grid,
                                        const UnitSystem& units, const Eigen::VectorXcd& psi,
                                        SpectralWorkspace& ws)
{
    check_hamiltonian(h);
    check_units(units);
    const auto& x = grid.points();
    const int n = grid.size();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd tmp(n), tmp2(n);

    if (h.kinetic != 0.0) {
        ws.apply_momentum(psi, tmp, units.hbar);
        ws.apply_momentum(tmp, tmp2, units.hbar);
        out += h.kinetic * tmp2;
    }
    if (h.potential != 0.0)
        out.array() += h.potential * x.square() * psi.array();
    if (h.cross != 0.0) {
        ws.apply_momentum(psi, tmp, units.hbar); // p psi
        tmp2.array() = x * psi.array();          // x psi
        Eigen::VectorXcd ptmp(n);
        ws.apply_momentum(tmp2, ptmp, units.hbar); // p x psi
        out.array() += h.cross * (x * tmp.array() + ptmp.array());
    }
    return out;
}

inline double quadratic_expectation(const SpatialGrid& grid, const Eigen::VectorXcd& psi,
                                    const QuadraticHamiltonian& h, const UnitSystem& units,
                                    SpectralWorkspace& ws)
{
    check_hamiltonian(h);
    check_units(units);
    const double dx = grid.dx();
    const auto& x = grid.points();

    double result = 0.0;
    Eigen::VectorXcd ppsi;
    if (h.kinetic != 0.0 || h.cross != 0.0) {
        ppsi.resize(grid.size());
        ws.apply_momentum(psi, ppsi, units.hbar);
    }
    if (h.kinetic != 0.0)
        result += h.kinetic * ppsi.squaredNorm() * dx; // <p psi|p psi>
    if (h.potential != 0.0)
        result += h.potential * (psi.array().abs2() * x.square()).sum() * dx;
    if (h.cross != 0.0) {
        // <x p + p x> = 2 Re <psi| x (p psi)>
        const std::complex<double> xp =
            (psi.array().conjugate() * x.cast<std::complex<double>>() * ppsi.array()).sum() * dx;
        result += h.cross * 2.0 * xp.real();
    }
    return result;
}

/// <psi| kinetic p^2 + potential x^2 + cross (xp+px) |psi>, real by construction.
inline double quadratic_expectation(const Wavefunction& psi, const QuadraticHamiltonian& h,
                                    const UnitSystem& units)
{
    const double n2 = psi.values().squaredNorm() * psi.grid().dx();
    if (std::abs(n2 - 1.0) > 1e-6)
        throw InvalidInput("quadratic_expectation: state is not normalized");
    SpectralWorkspace ws(psi.grid());
    return quadratic_expectation(psi.grid(), psi.values(), h, units, ws);
}

} // namespace sta
