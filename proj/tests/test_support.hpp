#pragma once

// Deterministic pseudo-random stream for property-style tests. No global
// state, fixed seeds: failures reproduce exactly.
struct Lcg {
    unsigned long long state;
    explicit Lcg(unsigned long long seed) : state(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0)
    {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        const double u = double((state >> 11) & ((1ull << 53) - 1)) / double(1ull << 53);
        return lo + (hi - lo) * u;
    }
};
