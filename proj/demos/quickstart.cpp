// Minimal library walkthrough: engineer a fast trap opening, drive it three
// ways, and print where each method lands.

#include <cstdio>

#include "sta/sta.hpp"

int main()
{
    using namespace sta;

    const double omega0 = 1.0, omegaf = 0.1, t_f = 1.0;

    // Inverse-invariant design: quintic b(t), then omega^2(t) from the
    // Ermakov equation.
    const ScalingFunction b = design_quintic(omega0, omegaf, t_f);
    const FrequencyProtocol engineered = invert_ermakov(b);
    std::printf("gamma = b(t_f) = %.6f\n", b.gamma());
    for (const TimeInterval& iv : detect_expulsive(engineered))
        std::printf("expulsive interval: [%.4f, %.4f]\n", iv.begin, iv.end);

    const SpatialGrid grid = grid_for_protocol(engineered, {});
    const FrequencyProtocol ramp = FrequencyProtocol::linear_ramp(omega0, omegaf, t_f);
    const Wavefunction psi0 = eigenstate(0, omega0, grid);
    const Wavefunction target = eigenstate(0, omegaf, grid);

    const auto run = [&](const char* label, HamiltonianSource source,
                         const FrequencyProtocol& protocol) {
        PropagationPlan plan{.source = source,
                             .protocol = protocol,
                             .grid = grid,
                             .units = {},
                             .n_steps = 0,
                             .n_records = 200,
                             .n_track = 8,
                             .target = target};
        const TrajectoryRecord rec = propagate(psi0, plan);
        std::printf("%-22s final fidelity %.6f, norm drift %.1e\n", label,
                    rec.fidelity_to_target.back(), rec.max_norm_drift);
    };

    run("inverse-invariant:", HamiltonianSource::InverseInvariant, engineered);
    run("transitionless (TT):", HamiltonianSource::Transitionless, ramp);
    run("plain fast ramp:", HamiltonianSource::Plain, ramp);
    return 0;
}
