#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "sta/errors.hpp"
#include "sta/grid.hpp"

namespace sta {

/// Complex amplitudes on a spatial grid. Every constructed Wavefunction is
/// normalized: sum |psi_j|^2 dx = 1. Instances are immutable values.
class Wavefunction {
public:
    Wavefunction(SpatialGrid grid, Eigen::VectorXcd amplitudes)
        : grid_(std::move(grid)), amps_(std::move(amplitudes))
    {
        if (amps_.size() != grid_.size())
            throw InvalidInput("wavefunction: amplitude count does not match grid");
        const double n2 = amps_.squaredNorm() * grid_.dx();
        if (!(n2 > 0.0) || !std::isfinite(n2))
            throw InvalidInput("wavefunction: amplitudes are not normalizable");
        amps_ *= 1.0 / std::sqrt(n2);
    }

    const SpatialGrid& grid() const { return grid_; }
    const Eigen::VectorXcd& values() const { return amps_; }
    int size() const { return grid_.size(); }

private:
    SpatialGrid grid_;
    Eigen::VectorXcd amps_;
};

/// <bra|ket> = sum conj(bra_j) ket_j dx. Conjugate-symmetric by construction.
inline std::complex<double> inner_product(const Wavefunction& bra, const Wavefunction& ket)
{
    if (!(bra.grid() == ket.grid()))
        throw InvalidInput("inner_product: wavefunctions live on different grids");
    return bra.values().dot(ket.values()) * bra.grid().dx();
}

} // namespace sta
