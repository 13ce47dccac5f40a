#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sta/counterdiabatic.hpp"
#include "sta/eigenstates.hpp"
#include "sta/ermakov.hpp"
#include "sta/errors.hpp"
#include "sta/fourier.hpp"
#include "sta/invariant.hpp"
#include "sta/protocol.hpp"
#include "sta/quadratic.hpp"
#include "sta/wavefunction.hpp"

namespace sta {

enum class HamiltonianSource {
    Plain,              // H0 with the given ramp
    InverseInvariant,   // H0 with engineered omega(t); omega^2 may go negative
    Transitionless,     // H0 + H1
    TransitionlessBare  // H1 only
};

struct PropagationPlan {
    HamiltonianSource source = HamiltonianSource::Plain;
    FrequencyProtocol protocol;
    SpatialGrid grid;
    UnitSystem units = {};
    int n_steps = 0;   // 0 = choose from the resolution rule (>= 1000)
    int n_records = 200;
    int n_track = 8;   // populations recorded for n = 0..n_track
    std::optional<Wavefunction> target; // reference state for the fidelity series
};

struct TrajectoryRecord {
    std::vector<double> times;
    Eigen::MatrixXd populations;             // one row per record, columns n = 0..n_track
    std::vector<double> fidelity_to_target;  // empty when no target was given
    std::vector<double> invariant_expect;    // <I(t)>
    std::vector<double> energy_expect;       // <H(t)> of the driving Hamiltonian
    std::vector<double> norms;
    Wavefunction final_state;
    int n_steps = 0;
    double dt = 0.0;
    double max_norm_drift = 0.0;
    bool populations_in_lr_basis = false;
};

/// |<target|psi>|^2.
inline double fidelity(const Wavefunction& psi, const Wavefunction& target)
{
    const double f = std::norm(inner_product(target, psi));
    return std::clamp(f, 0.0, 1.0);
}

/// Grid sized for everything the protocol visits. Engineered protocols read
/// the spatial scale from the design: widths track b(t), so the effective
/// minimum frequency is omega0 / max(b)^2 (well-defined through expulsive
/// intervals). Other kinds use the smallest omega reached; expulsive
/// tabulated data has no usable scale and requires an explicit grid.
inline SpatialGrid grid_for_protocol(const FrequencyProtocol& protocol, const UnitSystem& units,
                                     int n_points = 1024, int n_fock = kMaxFockIndex,
                                     double margin = 1.5)
{
    double omega_eff;
    if (protocol.kind() == FrequencyProtocol::Kind::Engineered) {
        const double bmax = protocol.scaling()->max_value();
        omega_eff = protocol.omega0() / (bmax * bmax);
    } else {
        double min_w2 = protocol.omega_sq(0.0);
        for (int i = 1; i <= 2000; ++i)
            min_w2 = std::min(min_w2, protocol.omega_sq(protocol.t_f() * i / 2000.0));
        if (!(min_w2 > 0.0))
            throw InvalidInput("grid_for_protocol: expulsive tabulated protocol, provide "
                               "the grid explicitly");
        omega_eff = std::sqrt(min_w2);
    }
    return SpatialGrid::sized_for(omega_eff, units, n_points, n_fock, margin);
}

namespace detail {

inline bool uses_counterdiabatic(HamiltonianSource s)
{
    return s == HamiltonianSource::Transitionless || s == HamiltonianSource::TransitionlessBare;
}

// Fastest rate the step size has to resolve: max over t of sqrt(|omega^2|),
// and of |c| for counterdiabatic sources.
inline double max_coefficient_rate(const FrequencyProtocol& protocol, HamiltonianSource source)
{
    double rate = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double t = protocol.t_f() * i / 2000.0;
        rate = std::max(rate, std::sqrt(std::abs(protocol.omega_sq(t))));
        if (uses_counterdiabatic(source))
            rate = std::max(rate, std::abs(h1_term(protocol, t).coefficient));
    }
    return rate;
}

inline void validate_plan_compatibility(const PropagationPlan& plan)
{
    const auto kind = plan.protocol.kind();
    if (plan.source == HamiltonianSource::InverseInvariant) {
        if (kind != FrequencyProtocol::Kind::Engineered)
            throw InvalidInput("plan: the inverse-invariant source needs an engineered protocol");
        return;
    }
    if (plan.source == HamiltonianSource::Plain && kind == FrequencyProtocol::Kind::Engineered)
        throw InvalidInput("plan: use the inverse-invariant source for engineered protocols");
    // All non-II sources need a real omega(t) along the whole protocol.
    for (int i = 0; i <= 2000; ++i) {
        const double t = plan.protocol.t_f() * i / 2000.0;
        if (!(plan.protocol.omega_sq(t) > 0.0))
            throw InvalidInput("plan: omega^2 <= 0 at t = " + std::to_string(t) +
                               "; only the inverse-invariant source supports expulsive "
                               "intervals");
    }
}

} // namespace detail

/// Steps the plan is going to take: the requested count, or the default rule
/// max(1000, t_f * max_rate / 0.05) when the plan leaves it at 0.
inline int resolve_steps(const PropagationPlan& plan)
{
    const double rate = detail::max_coefficient_rate(plan.protocol, plan.source);
    if (plan.n_steps == 0)
        return std::max(1000, int(std::ceil(plan.protocol.t_f() * rate / 0.05)));
    if (plan.n_steps < 1) throw InvalidInput("plan: n_steps must be positive");
    const double dt = plan.protocol.t_f() / plan.n_steps;
    if (dt * rate > 0.05 * (1.0 + 1e-9))
        throw InvalidInput("plan: dt = " + std::to_string(dt) +
                           " does not resolve the fastest coefficient rate " +
                           std::to_string(rate) + " (need dt * rate <= 0.05)");
    return plan.n_steps;
}

/// Evolves psi0 under the plan with symmetric Strang splitting per step,
/// coefficients frozen at the step midpoint:
///   V(dt/2) D(dt/2) K(dt) D(dt/2) V(dt/2)
/// where V is the pointwise x^2 phase, K the Fourier-space kinetic phase and
/// D the exact dilation generated by the (xp+px) term (a coordinate rescaling
/// with log-scale r = -2 g tau). The dilation substep being exact, splitting
/// error comes only from the non-commuting V/K/D pairs and the midpoint rule,
/// both second order in dt.
inline TrajectoryRecord propagate(const Wavefunction& psi0, const PropagationPlan& plan)
{
    check_units(plan.units);
    if (!(psi0.grid() == plan.grid))
        throw InvalidInput("propagate: psi0 lives on a different grid than the plan");
    if (plan.target && !(plan.target->grid() == plan.grid))
        throw InvalidInput("propagate: target lives on a different grid than the plan");
    if (plan.n_track < 0 || plan.n_track > kMaxFockIndex)
        throw InvalidInput("propagate: n_track out of range");
    if (plan.n_records < 2) throw InvalidInput("propagate: need at least 2 records");
    detail::validate_plan_compatibility(plan);

    const auto& protocol = plan.protocol;
    const UnitSystem& units = plan.units;
    const SpatialGrid& grid = plan.grid;
    const int n = grid.size();
    const double hbar = units.hbar;
    const double mass = units.mass;
    const double t_f = protocol.t_f();

    const int n_steps = resolve_steps(plan);
    const double dt = t_f / n_steps;
    const int n_records = std::min(plan.n_records, n_steps + 1);

    std::vector<int> record_steps(n_records);
    for (int i = 0; i < n_records; ++i)
        record_steps[i] = int(std::llround(double(i) * n_steps / (n_records - 1)));

    std::vector<double> record_times(n_records);
    for (int i = 0; i < n_records; ++i) record_times[i] = record_steps[i] * dt;

    // b(t) at the record times defines I(t): the design's own b for engineered
    // protocols, the forward Ermakov solution with b(0)=1, bdot(0)=0 otherwise.
    std::vector<double> b_rec(n_records), bdot_rec(n_records);
    if (protocol.kind() == FrequencyProtocol::Kind::Engineered) {
        const ScalingFunction& b = *protocol.scaling();
        for (int i = 0; i < n_records; ++i) {
            b_rec[i] = b.value(record_times[i]);
            bdot_rec[i] = b.first(record_times[i]);
        }
    } else {
        const ErmakovSolution sol = solve_ermakov_forward(protocol, record_times);
        b_rec = sol.b;
        bdot_rec = sol.bdot;
    }

    const bool lr_basis = plan.source == HamiltonianSource::InverseInvariant;
    const bool bare = plan.source == HamiltonianSource::TransitionlessBare;
    const bool counterdiabatic = detail::uses_counterdiabatic(plan.source);
    const double alpha = bare ? 0.0 : 1.0 / (2.0 * mass);

    SpectralWorkspace ws(grid);
    Eigen::VectorXcd psi = psi0.values();
    Eigen::VectorXcd spec(n);
    const Eigen::ArrayXd x2 = grid.points().square();
    Eigen::ArrayXd phase(n);
    Eigen::ArrayXcd vfactor(n);

    // alpha never depends on t, so the full-step kinetic phase is fixed.
    Eigen::VectorXcd kinetic_phase(n);
    {
        const auto& k = grid.wavenumbers();
        for (int m = 0; m < n; ++m) {
            const double p = hbar * k[m];
            kinetic_phase[m] = std::polar(1.0, -alpha * p * p * dt / hbar);
        }
    }

    TrajectoryRecord rec{.times = record_times,
                         .populations = Eigen::MatrixXd::Zero(n_records, plan.n_track + 1),
                         .fidelity_to_target = {},
                         .invariant_expect = std::vector<double>(n_records),
                         .energy_expect = std::vector<double>(n_records),
                         .norms = std::vector<double>(n_records),
                         .final_state = psi0,
                         .n_steps = n_steps,
                         .dt = dt,
                         .max_norm_drift = 0.0,
                         .populations_in_lr_basis = lr_basis};
    if (plan.target) rec.fidelity_to_target.resize(n_records);

    auto beta_at = [&](double t) {
        return bare ? 0.0 : 0.5 * mass * protocol.omega_sq(t);
    };
    auto g_at = [&](double t) {
        return counterdiabatic ? -h1_term(protocol, t).coefficient : 0.0;
    };

    auto record_observables = [&](int idx) {
        const double t = record_times[idx];
        const double norm2 = psi.squaredNorm() * grid.dx();
        rec.norms[idx] = std::sqrt(norm2);
        rec.max_norm_drift = std::max(rec.max_norm_drift, std::abs(rec.norms[idx] - 1.0));
        if (std::abs(rec.norms[idx] - 1.0) > 1e-6)
            throw NumericalFailure("propagate: norm drifted to " + std::to_string(rec.norms[idx]) +
                                   " at t = " + std::to_string(t) + " (step " +
                                   std::to_string(record_steps[idx]) + ")");
        const double edge = std::max({std::abs(psi[0]), std::abs(psi[1]), std::abs(psi[n - 2]),
                                      std::abs(psi[n - 1])});
        if (edge > 1e-6)
            throw NumericalFailure("propagate: support reached the grid boundary at t = " +
                                   std::to_string(t) + " (amplitude " + std::to_string(edge) +
                                   "); widen the grid");
        // k-space analog of the boundary check: weight near Nyquist means the
        // chirp the protocol builds up is aliasing, which corrupts the run
        // silently (norm and x-support both stay fine).
        ws.forward(psi, spec);
        double high_k = 0.0;
        const auto& k = grid.wavenumbers();
        for (int m = 0; m < n; ++m)
            if (std::abs(k[m]) > 0.9 * grid.max_wavenumber()) high_k += std::norm(spec[m]);
        if (high_k > 1e-6 * spec.squaredNorm())
            throw NumericalFailure("propagate: momentum content reached the grid's resolution "
                                   "limit at t = " +
                                   std::to_string(t) + "; use more grid points");

        if (lr_basis) {
            // Populations against the invariant modes: strip the common chirp,
            // then it is a plain Hermite-ladder overlap sweep.
            const double b = b_rec[idx], bdot = bdot_rec[idx];
            const double chirp = 0.5 * mass * bdot / (hbar * b);
            const double scale = std::pow(mass * protocol.omega0() / hbar, 0.25) / std::sqrt(b);
            Eigen::VectorXcd dechirped(n);
            for (int j = 0; j < n; ++j)
                dechirped[j] = psi[j] * std::polar(scale * grid.dx(), -chirp * x2[j]);
            HermiteLadder ladder(std::sqrt(mass * protocol.omega0() / hbar) / b * grid.points());
            for (int m = 0; m <= plan.n_track; ++m) {
                const Eigen::ArrayXd& u = ladder.ascend_to(m);
                const std::complex<double> ov = (u.cast<std::complex<double>>() *
                                                 dechirped.array())
                                                    .sum();
                rec.populations(idx, m) = std::norm(ov);
            }
        } else {
            const Eigen::VectorXcd ov =
                eigenstate_overlaps(grid, psi, protocol.omega(t), plan.n_track, units);
            rec.populations.row(idx) = ov.array().abs2().transpose();
        }

        if (plan.target)
            rec.fidelity_to_target[idx] = std::clamp(
                std::norm(plan.target->values().dot(psi) * grid.dx()), 0.0, 1.0);

        rec.invariant_expect[idx] = quadratic_expectation(
            grid, psi, lr_invariant_hamiltonian(b_rec[idx], bdot_rec[idx], protocol.omega0(), units),
            units, ws);

        const QuadraticHamiltonian h{alpha, beta_at(t), g_at(t)};
        rec.energy_expect[idx] = quadratic_expectation(grid, psi, h, units, ws);
    };

    auto apply_potential_half = [&](double beta) {
        if (beta == 0.0) return;
        phase = (-beta * 0.5 * dt / hbar) * x2;
        vfactor.real() = phase.cos();
        vfactor.imag() = phase.sin();
        psi.array() *= vfactor;
    };

    int next_record = 0;
    for (int step = 0; step < n_steps; ++step) {
        if (next_record < n_records && record_steps[next_record] == step)
            record_observables(next_record++);

        const double t_mid = (step + 0.5) * dt;
        const double g = g_at(t_mid);

        if (bare) {
            if (g != 0.0) ws.scale_coordinates(psi, -2.0 * g * dt);
            continue;
        }

        const double beta = beta_at(t_mid);
        apply_potential_half(beta);
        if (g != 0.0) ws.scale_coordinates(psi, -g * dt);
        ws.forward(psi, spec);
        spec.array() *= kinetic_phase.array();
        ws.inverse(spec, psi);
        if (g != 0.0) ws.scale_coordinates(psi, -g * dt);
        apply_potential_half(beta);
    }
    record_observables(n_records - 1);

    rec.final_state = Wavefunction(grid, std::move(psi));
    return rec;
}

/// Control experiment: the same endpoints driven by a plain linear ramp
/// stretched by kappa. Large kappa satisfies |omega_dot|/omega^2 << 1 and
/// recovers the adiabatic result; kappa = 1 exposes the transitions a naive
/// fast ramp induces.
inline TrajectoryRecord adiabatic_reference(double omega0, double omegaf, double t_f, double kappa,
                                            int n0, const UnitSystem& units = {},
                                            int n_points = 1024, int n_steps = 0)
{
    if (!(kappa >= 1.0)) throw InvalidInput("adiabatic_reference: kappa must be >= 1");
    const FrequencyProtocol ramp = FrequencyProtocol::linear_ramp(omega0, omegaf, kappa * t_f);
    const SpatialGrid grid = grid_for_protocol(ramp, units, n_points);
    PropagationPlan plan{.source = HamiltonianSource::Plain,
                         .protocol = ramp,
                         .grid = grid,
                         .units = units,
                         .n_steps = n_steps,
                         .n_records = 200,
                         .n_track = 8,
                         .target = eigenstate(n0, omegaf, grid, units)};
    return propagate(eigenstate(n0, omega0, grid, units), plan);
}

} // namespace sta
