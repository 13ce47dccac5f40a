#pragma once

#include <cmath>
#include <complex>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sta/eigenstates.hpp"
#include "sta/errors.hpp"
#include "sta/hermite.hpp"
#include "sta/quadratic.hpp"
#include "sta/scaling.hpp"
#include "sta/units.hpp"
#include "sta/wavefunction.hpp"

namespace sta {

/// Lewis-Riesenfeld invariant of a generalized harmonic oscillator, written in
/// quadratic form. With pi = b p - m bdot x,
///   I = (1/2)(m omega0^2 x^2/b^2 + pi^2/m)
///     = (b^2/2m) p^2 + (m omega0^2/2b^2 + m bdot^2/2) x^2 - (b bdot/2)(xp+px).
inline QuadraticHamiltonian lr_invariant_hamiltonian(double b, double bdot, double omega0,
                                                     const UnitSystem& units)
{
    const double m = units.mass;
    return {b * b / (2.0 * m), m * omega0 * omega0 / (2.0 * b * b) + 0.5 * m * bdot * bdot,
            -0.5 * b * bdot};
}

/// A scaling function with the invariant-engineering boundary conditions
/// pinned: b(0)=1, bdot(0)=0, bdd(0)=0 (so that I(0) = H0(0)) and
/// bdot(t_f)=0, bdd(t_f)=0 (so that [I(t_f), H0(t_f)] = 0).
class InvariantSpec {
public:
    explicit InvariantSpec(ScalingFunction scaling) : b_(std::move(scaling))
    {
        const double t_f = b_.t_f();
        const double tol = 1e-9;
        if (std::abs(b_.value(0.0) - 1.0) > tol || std::abs(b_.first(0.0)) > tol / t_f ||
            std::abs(b_.second(0.0)) > tol / (t_f * t_f))
            throw InvalidInput("invariant: b must satisfy b(0)=1, b'(0)=0, b''(0)=0");
        if (std::abs(b_.first(t_f)) > tol / t_f || std::abs(b_.second(t_f)) > tol / (t_f * t_f))
            throw InvalidInput("invariant: b must satisfy b'(t_f)=0, b''(t_f)=0");
    }

    const ScalingFunction& scaling() const { return b_; }
    double omega0() const { return b_.omega0(); }
    double t_f() const { return b_.t_f(); }
    double gamma() const { return b_.gamma(); }

    /// theta(t) = int_0^t omega0 / b^2 dt', by adaptive Gauss-Kronrod.
    double lr_phase(double t) const
    {
        if (t == 0.0) return 0.0;
        const double w0 = omega0();
        auto f = [this, w0](double u) {
            const double b = b_.value(u);
            return w0 / (b * b);
        };
        return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, t, 15, 1e-12);
    }

    QuadraticHamiltonian hamiltonian(double t, const UnitSystem& units) const
    {
        return lr_invariant_hamiltonian(b_.value(t), b_.first(t), omega0(), units);
    }

private:
    ScalingFunction b_;
};

namespace detail {

/// Invariant eigenmode with an explicit phase angle theta (callers that only
/// need moduli pass theta = 0 and skip the quadrature).
inline Eigen::VectorXcd lr_mode_amplitudes(int n, double b, double bdot, double theta,
                                           double omega0, const SpatialGrid& grid,
                                           const UnitSystem& units)
{
    check_fock_index(n);
    const double m = units.mass;
    const double hbar = units.hbar;

    HermiteLadder ladder(std::sqrt(m * omega0 / hbar) / b * grid.points());
    const Eigen::ArrayXd& u = ladder.ascend_to(n);
    const double scale = std::pow(m * omega0 / hbar, 0.25) / std::sqrt(b);

    const double chirp = 0.5 * m * bdot / (hbar * b);
    const double global = -(n + 0.5) * theta;
    Eigen::VectorXcd amps(grid.size());
    const auto& x = grid.points();
    for (int j = 0; j < grid.size(); ++j)
        amps[j] = scale * u[j] * std::polar(1.0, global + chirp * x[j] * x[j]);
    return amps;
}

} // namespace detail

/// Invariant eigenmode Psi_n(t, x): the Lewis-Riesenfeld solution of the
/// time-dependent Schroedinger equation,
///   Psi_n = (m w0 / pi hbar)^{1/4} (2^n n! b)^{-1/2}
///           e^{-i (n+1/2) int_0^t w0/b^2 dt'}
///           e^{ i (m/2 hbar)(bdot/b + i w0/b^2) x^2 }
///           H_n( sqrt(m w0 / hbar) x / b ).
inline Wavefunction lr_mode(int n, double t, const InvariantSpec& spec, const SpatialGrid& grid,
                            const UnitSystem& units = {})
{
    check_units(units);
    const auto& b = spec.scaling();
    Eigen::VectorXcd amps = detail::lr_mode_amplitudes(n, b.value(t), b.first(t), spec.lr_phase(t),
                                                       spec.omega0(), grid, units);
    return Wavefunction(grid, std::move(amps));
}

/// <psi| I(t) |psi>; equals hbar omega0 (n + 1/2) on the n-th invariant mode
/// at every t.
inline double invariant_expectation(const Wavefunction& psi, const InvariantSpec& spec, double t,
                                    const UnitSystem& units = {})
{
    return quadratic_expectation(psi, spec.hamiltonian(t, units), units);
}

} // namespace sta
