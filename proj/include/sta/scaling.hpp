#pragma once

#include <array>
#include <cmath>
#include <string>

#include "sta/errors.hpp"

namespace sta {

/// Scaling function b(t) = sum_j a_j (t/t_f)^j, degree <= 5, with analytic
/// derivatives. b must stay positive on [0, t_f]; that is checked once at
/// construction by dense sampling, so downstream code can divide by b freely.
class ScalingFunction {
public:
    ScalingFunction(const std::array<double, 6>& coeffs, double t_f, double omega0)
        : a_(coeffs), t_f_(t_f), omega0_(omega0)
    {
        if (!(t_f > 0.0)) throw InvalidInput("scaling: t_f must be positive");
        if (!(omega0 > 0.0)) throw InvalidInput("scaling: omega0 must be positive");
        min_ = max_ = value(0.0);
        for (int i = 0; i <= kPositivitySamples; ++i) {
            const double b = value(t_f_ * i / kPositivitySamples);
            min_ = std::min(min_, b);
            max_ = std::max(max_, b);
        }
        if (!(min_ > 0.0))
            throw InvalidInput("scaling: b(t) must be positive on [0, t_f], dipped to " +
                               std::to_string(min_));
    }

    double t_f() const { return t_f_; }
    double omega0() const { return omega0_; }
    const std::array<double, 6>& coefficients() const { return a_; }

    /// gamma = b(t_f), the final width ratio.
    double gamma() const { return value(t_f_); }
    double min_value() const { return min_; }
    double max_value() const { return max_; }

    double value(double t) const
    {
        const double s = t / t_f_;
        double b = 0.0;
        for (int j = 5; j >= 0; --j) b = b * s + a_[j];
        return b;
    }

    double first(double t) const
    {
        const double s = t / t_f_;
        double d = 0.0;
        for (int j = 5; j >= 1; --j) d = d * s + j * a_[j];
        return d / t_f_;
    }

    double second(double t) const
    {
        const double s = t / t_f_;
        double d = 0.0;
        for (int j = 5; j >= 2; --j) d = d * s + j * (j - 1) * a_[j];
        return d / (t_f_ * t_f_);
    }

    double third(double t) const
    {
        const double s = t / t_f_;
        double d = 0.0;
        for (int j = 5; j >= 3; --j) d = d * s + j * (j - 1) * (j - 2) * a_[j];
        return d / (t_f_ * t_f_ * t_f_);
    }

private:
    static constexpr int kPositivitySamples = 4096;

    std::array<double, 6> a_;
    double t_f_;
    double omega0_;
    double min_ = 0.0, max_ = 0.0;
};

/// The unique quintic with b(0)=1, b'(0)=b''(0)=0, b(t_f)=gamma,
/// b'(t_f)=b''(t_f)=0, gamma = sqrt(omega0/omegaf). In s = t/t_f it is the
/// smoothstep profile b = 1 + (gamma-1)(10 s^3 - 15 s^4 + 6 s^5).
inline ScalingFunction design_quintic(double omega0, double omegaf, double t_f)
{
    if (!(omega0 > 0.0) || !(omegaf > 0.0) || !(t_f > 0.0))
        throw InvalidInput("design_quintic: omega0, omegaf and t_f must be positive");
    const double gamma = std::sqrt(omega0 / omegaf);
    const double d = gamma - 1.0;
    return ScalingFunction({1.0, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d}, t_f, omega0);
}

} // namespace sta
