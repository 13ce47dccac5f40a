#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "sta/errors.hpp"
#include "sta/protocol.hpp"
#include "sta/scaling.hpp"

namespace sta {

/// Rearranged Ermakov equation: the protocol whose omega^2(t) makes the given
/// b(t) an exact solution with initial data b(0), bdot(0) taken from b itself.
inline FrequencyProtocol invert_ermakov(const ScalingFunction& b)
{
    return FrequencyProtocol::engineered(b);
}

struct ErmakovSolution {
    std::vector<double> times;
    std::vector<double> b;
    std::vector<double> bdot;
};

/// Integrates bdd + omega^2(t) b = omega0^2 / b^3 from (b0, bdot0) and samples
/// the solution at the requested times (increasing, within [0, t_f]).
/// Adaptive dopri5 with dense output; breakdown (b -> 0) is reported with the
/// time at which it happened.
inline ErmakovSolution solve_ermakov_forward(const FrequencyProtocol& protocol,
                                             const std::vector<double>& times, double b0 = 1.0,
                                             double bdot0 = 0.0, double rel_tol = 1e-10)
{
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;

    if (!(b0 > 0.0)) throw InvalidInput("ermakov: b0 must be positive");
    if (times.empty()) throw InvalidInput("ermakov: no sample times requested");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || times[i] > protocol.t_f() * (1.0 + 1e-12))
            throw InvalidInput("ermakov: sample times must lie in [0, t_f]");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw InvalidInput("ermakov: sample times must be strictly increasing");
    }

    const double w0sq = protocol.omega0() * protocol.omega0();
    auto rhs = [&](const State& y, State& dydt, double t) {
        if (!(y[0] > 1e-9) || !std::isfinite(y[0]))
            throw NumericalFailure("ermakov: b(t) broke down near t = " + std::to_string(t));
        dydt[0] = y[1];
        dydt[1] = w0sq / (y[0] * y[0] * y[0]) - protocol.omega_sq(t) * y[0];
    };

    ErmakovSolution out;
    out.times = times;
    out.b.reserve(times.size());
    out.bdot.reserve(times.size());

    std::vector<double> grid = times;
    if (grid.front() > 0.0) grid.insert(grid.begin(), 0.0);

    State y{b0, bdot0};
    auto stepper = ode::make_dense_output(1e-12, rel_tol, ode::runge_kutta_dopri5<State>());
    std::size_t emitted = grid.size() - times.size(); // skip the synthetic t=0 point
    std::size_t seen = 0;
    ode::integrate_times(stepper, rhs, y, grid.begin(), grid.end(), 1e-4 * protocol.t_f(),
                         [&](const State& s, double /*t*/) {
                             if (seen++ < emitted) return;
                             out.b.push_back(s[0]);
                             out.bdot.push_back(s[1]);
                         });
    return out;
}

struct TimeInterval {
    double begin = 0.0;
    double end = 0.0;
};

/// Maximal intervals of [0, t_f] where omega^2(t) < 0, located by a dense scan
/// (n_samples points) and refined by bisection to 1e-9 * t_f.
inline std::vector<TimeInterval> detect_expulsive(const FrequencyProtocol& protocol,
                                                  int n_samples = 10000)
{
    if (n_samples < 16) throw InvalidInput("detect_expulsive: need at least 16 samples");
    const double t_f = protocol.t_f();

    auto refine = [&](double lo, double hi) {
        // sign change between lo and hi; returns the crossing to 1e-9 * t_f
        const bool lo_neg = protocol.omega_sq(lo) < 0.0;
        while (hi - lo > 1e-9 * t_f) {
            const double mid = 0.5 * (lo + hi);
            if ((protocol.omega_sq(mid) < 0.0) == lo_neg)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<TimeInterval> intervals;
    bool inside = protocol.omega_sq(0.0) < 0.0;
    if (inside) intervals.push_back({0.0, t_f});
    double prev = 0.0;
    for (int i = 1; i <= n_samples; ++i) {
        const double t = t_f * double(i) / n_samples;
        const bool neg = protocol.omega_sq(t) < 0.0;
        if (neg != inside) {
            const double cross = refine(prev, t);
            if (neg)
                intervals.push_back({cross, t_f});
            else
                intervals.back().end = cross;
            inside = neg;
        }
        prev = t;
    }
    return intervals;
}

} // namespace sta
