#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sta/errors.hpp"
#include "sta/scaling.hpp"

namespace sta {

/// Trap frequency trajectory omega(t) on [0, t_f]. omega^2 is the primary
/// quantity: engineered and tabulated protocols may pass through omega^2 < 0
/// (expulsive parabola), in which case omega(t) itself is undefined there.
class FrequencyProtocol {
public:
    enum class Kind { Constant, LinearRamp, Engineered, Tabulated };

    static FrequencyProtocol constant(double omega0, double t_f)
    {
        check_positive(omega0, "omega0");
        check_positive(t_f, "t_f");
        return FrequencyProtocol(Kind::Constant, omega0, omega0, t_f);
    }

    static FrequencyProtocol linear_ramp(double omega0, double omegaf, double t_f)
    {
        check_positive(omega0, "omega0");
        check_positive(omegaf, "omegaf");
        check_positive(t_f, "t_f");
        return FrequencyProtocol(Kind::LinearRamp, omega0, omegaf, t_f);
    }

    /// omega^2(t) = omega0^2/b^4 - bdd/b, the Ermakov equation solved for
    /// omega^2 given the scaling function. Endpoint values follow from the
    /// boundary conditions on b.
    static FrequencyProtocol engineered(ScalingFunction b)
    {
        const double gamma = b.gamma();
        FrequencyProtocol p(Kind::Engineered, b.omega0(), b.omega0() / (gamma * gamma), b.t_f());
        p.scaling_ = std::move(b);
        p.check_endpoints();
        return p;
    }

    /// Samples (t_i, omega_i^2) with t_0 = 0 and t_last = t_f, strictly
    /// increasing; evaluated by 4-point Lagrange interpolation.
    static FrequencyProtocol tabulated(std::vector<double> times, std::vector<double> omega_sq)
    {
        if (times.size() != omega_sq.size() || times.size() < 4)
            throw InvalidInput("tabulated protocol: need >= 4 matching samples");
        if (times.front() != 0.0)
            throw InvalidInput("tabulated protocol: first sample must be at t = 0");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw InvalidInput("tabulated protocol: times must be strictly increasing");
        if (!(omega_sq.front() > 0.0) || !(omega_sq.back() > 0.0))
            throw InvalidInput("tabulated protocol: endpoint omega^2 must be positive");
        FrequencyProtocol p(Kind::Tabulated, std::sqrt(omega_sq.front()),
                            std::sqrt(omega_sq.back()), times.back());
        p.times_ = std::move(times);
        p.omega_sq_ = std::move(omega_sq);
        return p;
    }

    Kind kind() const { return kind_; }
    double omega0() const { return omega0_; }
    double omegaf() const { return omegaf_; }
    double t_f() const { return t_f_; }
    const ScalingFunction* scaling() const { return scaling_ ? &*scaling_ : nullptr; }

    double omega_sq(double t) const
    {
        switch (kind_) {
        case Kind::Constant: return omega0_ * omega0_;
        case Kind::LinearRamp: {
            const double w = omega0_ + (omegaf_ - omega0_) * t / t_f_;
            return w * w;
        }
        case Kind::Engineered: {
            const double b = scaling_->value(t);
            const double w0b2 = omega0_ / (b * b);
            return w0b2 * w0b2 - scaling_->second(t) / b;
        }
        case Kind::Tabulated: return interpolate_table(t);
        }
        return 0.0; // unreachable
    }

    /// omega(t) = sqrt(omega^2); fails on expulsive or closing traps.
    double omega(double t) const
    {
        const double w2 = omega_sq(t);
        if (!(w2 > 0.0))
            throw NumericalFailure("protocol: omega(t) undefined, omega^2 = " +
                                   std::to_string(w2) + " at t = " + std::to_string(t));
        return std::sqrt(w2);
    }

    /// d omega/dt. Analytic for closed-form kinds; 4th-order finite differences
    /// with one-sided stencils near the endpoints for tabulated data.
    double omega_dot(double t) const
    {
        switch (kind_) {
        case Kind::Constant: return 0.0;
        case Kind::LinearRamp: return (omegaf_ - omega0_) / t_f_;
        case Kind::Engineered: {
            const double b = scaling_->value(t);
            const double bd = scaling_->first(t);
            const double bdd = scaling_->second(t);
            const double bddd = scaling_->third(t);
            const double dw2 = -4.0 * omega0_ * omega0_ * bd / std::pow(b, 5) - bddd / b +
                               bdd * bd / (b * b);
            return dw2 / (2.0 * omega(t));
        }
        case Kind::Tabulated: {
            const double h = 1e-6 * t_f_;
            auto w = [this](double tt) { return omega(tt); };
            if (t < 2.0 * h)
                return (-25.0 * w(t) + 48.0 * w(t + h) - 36.0 * w(t + 2 * h) +
                        16.0 * w(t + 3 * h) - 3.0 * w(t + 4 * h)) /
                       (12.0 * h);
            if (t > t_f_ - 2.0 * h)
                return (25.0 * w(t) - 48.0 * w(t - h) + 36.0 * w(t - 2 * h) -
                        16.0 * w(t - 3 * h) + 3.0 * w(t - 4 * h)) /
                       (12.0 * h);
            return (-w(t + 2 * h) + 8.0 * w(t + h) - 8.0 * w(t - h) + w(t - 2 * h)) / (12.0 * h);
        }
        }
        return 0.0; // unreachable
    }

private:
    FrequencyProtocol(Kind kind, double omega0, double omegaf, double t_f)
        : kind_(kind), omega0_(omega0), omegaf_(omegaf), t_f_(t_f)
    {
    }

    static void check_positive(double v, const char* name)
    {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidInput(std::string("protocol: ") + name + " must be positive");
    }

    void check_endpoints() const
    {
        const double w0sq = omega0_ * omega0_;
        const double wfsq = omegaf_ * omegaf_;
        if (std::abs(omega_sq(0.0) - w0sq) > 1e-9 * w0sq ||
            std::abs(omega_sq(t_f_) - wfsq) > 1e-9 * wfsq)
            throw InvalidInput("protocol: omega^2 endpoints do not match omega0/omegaf");
    }

    double interpolate_table(double t) const
    {
        const auto& ts = times_;
        const int n = int(ts.size());
        // cubic Lagrange on the 4 samples around t
        int i = int(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
        int lo = std::clamp(i - 1, 0, n - 4);
        double result = 0.0;
        for (int p = lo; p < lo + 4; ++p) {
            double l = 1.0;
            for (int q = lo; q < lo + 4; ++q)
                if (q != p) l *= (t - ts[q]) / (ts[p] - ts[q]);
            result += l * omega_sq_[p];
        }
        return result;
    }

    Kind kind_;
    double omega0_, omegaf_, t_f_;
    std::optional<ScalingFunction> scaling_;
    std::vector<double> times_, omega_sq_;
};

} // namespace sta
