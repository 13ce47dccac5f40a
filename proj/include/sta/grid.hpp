#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "sta/errors.hpp"
#include "sta/units.hpp"

namespace sta {

/// Uniform spatial grid, symmetric about the origin: x_j = -x_max + j*dx with
/// dx = 2*x_max/n. The right endpoint is excluded (periodic Fourier convention),
/// and n is a power of two so spectral operations stay cheap and exact.
class SpatialGrid {
public:
    SpatialGrid(double x_max, int n_points)
        : x_max_(x_max), n_(n_points)
    {
        if (!(x_max > 0.0) || !std::isfinite(x_max))
            throw InvalidInput("grid: x_max must be positive");
        if (n_points < 64 || (n_points & (n_points - 1)) != 0)
            throw InvalidInput("grid: n_points must be a power of two >= 64");
        dx_ = 2.0 * x_max_ / n_;
        points_.resize(n_);
        for (int j = 0; j < n_; ++j) points_[j] = -x_max_ + j * dx_;
        // FFT-ordered angular wavenumbers: dk = 2*pi/(n*dx) = pi/x_max.
        const double dk = std::numbers::pi / x_max_;
        wavenumbers_.resize(n_);
        for (int m = 0; m < n_; ++m)
            wavenumbers_[m] = (m < n_ / 2 ? m : m - n_) * dk;
    }

    /// Grid wide enough for eigenstates up to n_fock at the smallest frequency
    /// the protocol reaches: x_max = margin * sqrt((2*n_fock+1)*hbar/(m*omega_min)).
    /// States widen as omega shrinks, hence the dependence on omega_min.
    static SpatialGrid sized_for(double omega_min, const UnitSystem& units,
                                 int n_points = 1024, int n_fock = 64,
                                 double margin = 1.5)
    {
        check_units(units);
        if (!(omega_min > 0.0))
            throw InvalidInput("grid: omega_min must be positive");
        const double x_max =
            margin * std::sqrt((2.0 * n_fock + 1.0) * units.hbar / (units.mass * omega_min));
        return SpatialGrid(x_max, n_points);
    }

    int size() const { return n_; }
    double x_max() const { return x_max_; }
    double dx() const { return dx_; }
    double max_wavenumber() const { return std::numbers::pi / dx_; }
    const Eigen::ArrayXd& points() const { return points_; }
    const Eigen::ArrayXd& wavenumbers() const { return wavenumbers_; }

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b)
    {
        return a.n_ == b.n_ && a.x_max_ == b.x_max_;
    }

private:
    double x_max_;
    int n_;
    double dx_;
    Eigen::ArrayXd points_;
    Eigen::ArrayXd wavenumbers_;
};

} // namespace sta
