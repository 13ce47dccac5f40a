#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "sta/errors.hpp"
#include "sta/grid.hpp"
#include "sta/hermite.hpp"
#include "sta/units.hpp"
#include "sta/wavefunction.hpp"

namespace sta {

// Largest Fock index the analysis routines accept by default.
inline constexpr int kMaxFockIndex = 64;

// Amplitude a grid boundary is allowed to carry before the grid counts as too
// narrow for the requested state.
inline constexpr double kBoundaryAmplitudeLimit = 1e-12;

namespace detail {

inline void check_fock_index(int n)
{
    if (n < 0) throw InvalidInput("fock index must be >= 0");
    if (n > kMaxFockIndex)
        throw InvalidInput("fock index " + std::to_string(n) + " exceeds supported maximum " +
                           std::to_string(kMaxFockIndex));
}

inline Eigen::ArrayXd oscillator_abscissae(const SpatialGrid& grid, double omega,
                                           const UnitSystem& units)
{
    return std::sqrt(units.mass * omega / units.hbar) * grid.points();
}

} // namespace detail

/// n-th eigenstate of H0 = p^2/2m + m omega^2 x^2 / 2 sampled on the grid:
/// psi_n(x) = (m w / pi hbar)^{1/4} / sqrt(2^n n!) e^{-m w x^2 / 2 hbar} H_n(sqrt(m w/hbar) x).
inline Wavefunction eigenstate(int n, double omega, const SpatialGrid& grid,
                               const UnitSystem& units = {})
{
    detail::check_fock_index(n);
    check_units(units);
    if (!(omega > 0.0)) throw InvalidInput("eigenstate: omega must be positive");

    // The state's wavenumber content reaches ~sqrt((2n+1) m omega / hbar);
    // past ~90% of Nyquist the sampled state is aliased, not merely wide.
    const double k_turn = std::sqrt((2.0 * n + 1.0) * units.mass * omega / units.hbar);
    if (k_turn > 0.9 * grid.max_wavenumber())
        throw InvalidInput("eigenstate: grid spacing too coarse to resolve state (n=" +
                           std::to_string(n) + ", omega=" + std::to_string(omega) + ")");

    HermiteLadder ladder(detail::oscillator_abscissae(grid, omega, units));
    const Eigen::ArrayXd u = ladder.ascend_to(n);
    const double scale = std::pow(units.mass * omega / units.hbar, 0.25);
    Eigen::ArrayXd values = scale * u;

    const double edge = std::max(std::abs(values[0]), std::abs(values[grid.size() - 1]));
    if (edge >= kBoundaryAmplitudeLimit)
        throw InvalidInput("eigenstate: grid too narrow, boundary amplitude " +
                           std::to_string(edge) + " for n=" + std::to_string(n));

    Eigen::VectorXcd amps = values.cast<std::complex<double>>().matrix();
    return Wavefunction(grid, std::move(amps));
}

/// <n(omega)|psi> for n = 0..n_max in one recurrence sweep.
inline Eigen::VectorXcd eigenstate_overlaps(const SpatialGrid& grid, const Eigen::VectorXcd& psi,
                                            double omega, int n_max, const UnitSystem& units = {})
{
    detail::check_fock_index(n_max);
    check_units(units);
    if (!(omega > 0.0)) throw InvalidInput("eigenstate_overlaps: omega must be positive");

    const double k_turn = std::sqrt((2.0 * n_max + 1.0) * units.mass * omega / units.hbar);
    if (k_turn > 0.9 * grid.max_wavenumber())
        throw InvalidInput("eigenstate_overlaps: grid spacing too coarse for basis up to n=" +
                           std::to_string(n_max));

    const double scale = std::pow(units.mass * omega / units.hbar, 0.25);
    HermiteLadder ladder(detail::oscillator_abscissae(grid, omega, units));
    Eigen::VectorXcd overlaps(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        const Eigen::ArrayXd& u = ladder.ascend_to(n);
        overlaps[n] = (u.cast<std::complex<double>>() * psi.array()).sum() * scale * grid.dx();
    }
    // The widest basis member must have decayed by the boundary, or the
    // projections silently lose their tails.
    const Eigen::ArrayXd& top = ladder.values();
    if (std::max(std::abs(top[0]), std::abs(top[grid.size() - 1])) >= 1e-9)
        throw InvalidInput("eigenstate_overlaps: grid too narrow for basis up to n=" +
                           std::to_string(n_max));
    return overlaps;
}

/// P_n = |<n(omega)|psi>|^2 for n = 0..n_max.
inline Eigen::VectorXd populations(const Wavefunction& psi, double omega, int n_max = kMaxFockIndex,
                                   const UnitSystem& units = {})
{
    const Eigen::VectorXcd ov = eigenstate_overlaps(psi.grid(), psi.values(), omega, n_max, units);
    Eigen::VectorXd p = ov.array().abs2();
    if (p.sum() > 1.0 + 1e-9)
        throw NumericalFailure("populations: sum exceeds 1 (grid cannot represent the basis)");
    return p;
}

} // namespace sta
