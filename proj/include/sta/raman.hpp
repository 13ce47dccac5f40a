#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sta/errors.hpp"
#include "sta/protocol.hpp"
#include "sta/units.hpp"

namespace sta {

/// Laboratory parameters of a two-laser Raman setup on a trapped ion:
/// coupling strengths Omega_j, laser frequencies omega_j, phases phi_j,
/// wavevector projections k_j, electronic transition frequency omega_e,
/// trap frequency and ion mass.
struct RamanParams {
    double Omega1 = 0.0, Omega2 = 0.0;
    double omega1 = 0.0, omega2 = 0.0;
    double phi1 = 0.0, phi2 = 0.0;
    double k1 = 0.0, k2 = 0.0;
    double omega_e = 0.0;
    double trap_omega = 0.0;
    double mass = 1.0;
};

/// Effective two-photon quantities (the "tilde" parameters) derived from the
/// raw ones after adiabatic elimination of the excited state.
struct EffectiveRamanParams {
    double delta = 0.0;    // omega1 - omega2
    double eta = 0.0;      // eta1 - eta2
    double phi = 0.0;      // phi1 - phi2
    double Omega = 0.0;    // Omega1 Omega2 / (2 Delta)
    double stark = 0.0;    // (Omega1^2 + Omega2^2) / (4 Delta)
    double Delta = 0.0;    // omega_L - omega_e
    double omega_L = 0.0;  // (omega1 + omega2) / 2
    double x0 = 0.0;       // sqrt(hbar / 2 m omega)
    double eta1 = 0.0, eta2 = 0.0; // k_j x0 (Lamb-Dicke parameters)
    double trap_omega = 0.0;
    double validity_ratio = 0.0;   // |Delta| / max(Omega_j, omega)
    bool validity_warning = false; // ratio below threshold: |Delta| >> Omega_j, omega violated
};

inline EffectiveRamanParams effective_params(const RamanParams& raw, const UnitSystem& units = {},
                                             double validity_threshold = 20.0)
{
    check_units(units);
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidInput(std::string("raman: ") + name + " must be positive");
    };
    positive(raw.Omega1, "Omega1");
    positive(raw.Omega2, "Omega2");
    positive(raw.omega1, "omega1");
    positive(raw.omega2, "omega2");
    positive(raw.omega_e, "omega_e");
    positive(raw.trap_omega, "trap_omega");
    positive(raw.mass, "mass");

    EffectiveRamanParams eff;
    eff.delta = raw.omega1 - raw.omega2;
    eff.phi = raw.phi1 - raw.phi2;
    eff.omega_L = 0.5 * (raw.omega1 + raw.omega2);
    eff.Delta = eff.omega_L - raw.omega_e;
    if (eff.Delta == 0.0)
        throw InvalidInput("raman: zero two-photon detuning Delta");
    eff.Omega = raw.Omega1 * raw.Omega2 / (2.0 * eff.Delta);
    eff.stark = (raw.Omega1 * raw.Omega1 + raw.Omega2 * raw.Omega2) / (4.0 * eff.Delta);
    eff.x0 = std::sqrt(units.hbar / (2.0 * raw.mass * raw.trap_omega));
    eff.eta1 = raw.k1 * eff.x0;
    eff.eta2 = raw.k2 * eff.x0;
    eff.eta = eff.eta1 - eff.eta2;
    eff.trap_omega = raw.trap_omega;
    eff.validity_ratio =
        std::abs(eff.Delta) / std::max({raw.Omega1, raw.Omega2, raw.trap_omega});
    eff.validity_warning = eff.validity_ratio < validity_threshold;
    return eff;
}

/// Second-blue-sideband coupling H_2B = i hbar (eta^2 Omega / 4)(a^2 - a+^2),
/// valid on resonance delta = 2 omega with relative phase phi = -pi/2.
struct SidebandCoupling {
    double coefficient = 0.0;
    bool resonance_ok = false;
    bool phase_ok = false;
};

inline SidebandCoupling second_sideband_coupling(const EffectiveRamanParams& eff,
                                                 double resonance_tol_rel = 1e-6,
                                                 double phase_tol = 1e-6)
{
    SidebandCoupling out;
    out.coefficient = eff.eta * eff.eta * eff.Omega / 4.0;
    out.resonance_ok =
        std::abs(eff.delta - 2.0 * eff.trap_omega) < resonance_tol_rel * eff.trap_omega;
    const double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(eff.phi + 0.5 * std::numbers::pi, two_pi);
    if (wrapped > std::numbers::pi) wrapped -= two_pi;
    if (wrapped < -std::numbers::pi) wrapped += two_pi;
    out.phase_ok = std::abs(wrapped) < phase_tol;
    return out;
}

/// max_t |omega_dot| / omega^2, the dimensionless adiabaticity rate; << 1
/// means the plain ramp is already transition-free. Undefined through
/// expulsive intervals.
struct AdiabaticityReport {
    double max_value = 0.0;
    double argmax_time = 0.0;
};

inline AdiabaticityReport adiabaticity_diagnostic(const FrequencyProtocol& protocol,
                                                  int n_samples = 10000)
{
    if (n_samples < 2) throw InvalidInput("adiabaticity_diagnostic: need >= 2 samples");
    AdiabaticityReport out;
    for (int i = 0; i <= n_samples; ++i) {
        const double t = protocol.t_f() * i / n_samples;
        const double w2 = protocol.omega_sq(t);
        if (!(w2 > 0.0))
            throw NumericalFailure("adiabaticity_diagnostic: omega^2 <= 0 at t = " +
                                   std::to_string(t) + " (diagnostic not applicable)");
        const double value = std::abs(protocol.omega_dot(t)) / w2;
        if (value > out.max_value) {
            out.max_value = value;
            out.argmax_time = t;
        }
    }
    return out;
}

/// Required counterdiabatic prefactor |omega_dot/(4 omega)| along the protocol
/// versus the fixed second-sideband coupling the Raman setup provides. The
/// flag is raised when the required coefficient varies by more than 10% over
/// any sliding trap period 2 pi / omega(t): a static coupling cannot track it.
struct MismatchReport {
    std::vector<double> times;
    std::vector<double> required;
    double available = 0.0;
    std::vector<double> relative_mismatch;
    bool static_coupling_cannot_track = false;
};

inline MismatchReport tt_mismatch_report(const FrequencyProtocol& protocol,
                                         const EffectiveRamanParams& eff, int n_samples = 1000)
{
    if (n_samples < 2) throw InvalidInput("tt_mismatch_report: need >= 2 samples");
    MismatchReport out;
    out.available = std::abs(eff.eta * eff.eta * eff.Omega / 4.0);
    out.times.resize(n_samples + 1);
    out.required.resize(n_samples + 1);
    out.relative_mismatch.resize(n_samples + 1);
    for (int i = 0; i <= n_samples; ++i) {
        const double t = protocol.t_f() * i / n_samples;
        const double w = protocol.omega(t);
        out.times[i] = t;
        out.required[i] = std::abs(protocol.omega_dot(t) / (4.0 * w));
        out.relative_mismatch[i] =
            out.available > 0.0 ? (out.required[i] - out.available) / out.available
                                : out.required[i];
    }
    for (int i = 0; i <= n_samples; ++i) {
        const double period = 2.0 * std::numbers::pi / protocol.omega(out.times[i]);
        double lo = out.required[i], hi = out.required[i];
        for (int j = i; j <= n_samples && out.times[j] <= out.times[i] + period; ++j) {
            lo = std::min(lo, out.required[j]);
            hi = std::max(hi, out.required[j]);
        }
        if (hi - lo > 0.1 * std::max(hi, 1e-300)) {
            out.static_coupling_cannot_track = true;
            break;
        }
    }
    return out;
}

} // namespace sta
