#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "sta/eigenstates.hpp"
#include "sta/fourier.hpp"
#include "sta/quadratic.hpp"
#include "sta/wavefunction.hpp"
#include "test_support.hpp"

using namespace sta;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent reference eigenstate from the textbook formula with explicit
// normalization (no recurrence): used as the oracle for the production path.
Eigen::VectorXcd reference_eigenstate(int n, double omega, const SpatialGrid& grid, double hbar,
                                      double mass)
{
    const double a = mass * omega / hbar;
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    const double norm = std::pow(a / std::numbers::pi, 0.25) / std::sqrt(std::pow(2.0, n) * fact);
    Eigen::VectorXcd out(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        const double xi = std::sqrt(a) * grid.points()[j];
        out[j] = norm * std::exp(-0.5 * xi * xi) * std::hermite(unsigned(n), xi);
    }
    return out;
}

double overlap_oracle(int m, int n, double omega_bra, double omega_ket, const SpatialGrid& grid)
{
    const Eigen::VectorXcd bra = reference_eigenstate(m, omega_bra, grid, 1.0, 1.0);
    const Eigen::VectorXcd ket = reference_eigenstate(n, omega_ket, grid, 1.0, 1.0);
    return (bra.dot(ket) * grid.dx()).real();
}

} // namespace

TEST_CASE("grid construction and validation")
{
    SpatialGrid g(10.0, 256);
    REQUIRE(g.size() == 256);
    REQUIRE_THAT(g.dx(), WithinRel(20.0 / 256, 1e-15));
    REQUIRE_THAT(g.points()[0], WithinAbs(-10.0, 1e-15));
    REQUIRE_THAT(g.points()[128], WithinAbs(0.0, 1e-12));
    // FFT ordering: k[0] = 0, k[n/2] is the most negative mode
    REQUIRE(g.wavenumbers()[0] == 0.0);
    REQUIRE(g.wavenumbers()[1] > 0.0);
    REQUIRE(g.wavenumbers()[255] < 0.0);

    REQUIRE_THROWS_AS(SpatialGrid(-1.0, 256), InvalidInput);
    REQUIRE_THROWS_AS(SpatialGrid(1.0, 100), InvalidInput); // not a power of two
    REQUIRE_THROWS_AS(SpatialGrid(1.0, 32), InvalidInput);  // too small
}

TEST_CASE("ground state matches the closed form")
{
    const SpatialGrid grid = SpatialGrid::sized_for(1.0, {});
    const Wavefunction psi = eigenstate(0, 1.0, grid);
    const double norm = std::pow(std::numbers::pi, -0.25);
    for (int j = 0; j < grid.size(); j += 7) {
        const double x = grid.points()[j];
        REQUIRE_THAT(psi.values()[j].real(), WithinAbs(norm * std::exp(-0.5 * x * x), 1e-12));
        REQUIRE(psi.values()[j].imag() == 0.0);
    }
    REQUIRE_THAT(inner_product(psi, psi).real(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("eigenstate x^2 expectation, n=3 omega=2")
{
    const SpatialGrid grid = SpatialGrid::sized_for(2.0, {});
    // oracle: grid quadrature of the analytic |psi|^2 x^2
    const Eigen::VectorXcd ref = reference_eigenstate(3, 2.0, grid, 1.0, 1.0);
    double x2 = 0.0;
    for (int j = 0; j < grid.size(); ++j)
        x2 += std::norm(ref[j]) * grid.points()[j] * grid.points()[j] * grid.dx();
    REQUIRE_THAT(x2, WithinRel(1.75, 1e-10)); // (3 + 1/2) hbar / (m * 2)

    const Wavefunction psi = eigenstate(3, 2.0, grid);
    const double via_op = quadratic_expectation(psi, {0.0, 1.0, 0.0}, {});
    REQUIRE_THAT(via_op, WithinRel(1.75, 1e-10));
}

TEST_CASE("inner products")
{
    const SpatialGrid grid = SpatialGrid::sized_for(1.0, {});
    const Wavefunction a = eigenstate(0, 1.0, grid);
    const Wavefunction b = eigenstate(1, 1.0, grid);

    REQUIRE_THAT(std::abs(inner_product(a, b)), WithinAbs(0.0, 1e-12));

    // conjugate symmetry on a complex pair
    Eigen::VectorXcd mix = a.values() + std::complex<double>(0, 0.5) * b.values();
    const Wavefunction c(grid, mix);
    const auto ab = inner_product(a, c);
    const auto ba = inner_product(c, a);
    REQUIRE_THAT(std::abs(ab - std::conj(ba)), WithinAbs(0.0, 1e-14));

    // frequency-change overlap <0(w0)|0(4 w0)> = sqrt(2 sqrt(w0*4w0)/(w0+4w0))
    const Wavefunction wide = eigenstate(0, 1.0, grid);
    const Wavefunction narrow = eigenstate(0, 4.0, grid);
    const double expected = std::sqrt(2.0 * std::sqrt(4.0) / 5.0); // = sqrt(4/5)
    REQUIRE_THAT(inner_product(wide, narrow).real(), WithinAbs(expected, 1e-12));
    REQUIRE_THAT(expected, WithinAbs(0.894427190999916, 1e-12));

    const SpatialGrid other(grid.x_max(), 2 * grid.size());
    const Wavefunction d = eigenstate(0, 1.0, other);
    REQUIRE_THROWS_AS(inner_product(a, d), InvalidInput);
}

TEST_CASE("populations")
{
    const SpatialGrid grid = SpatialGrid::sized_for(1.0, {});

    SECTION("pure eigenstate")
    {
        const Wavefunction psi = eigenstate(2, 1.0, grid);
        const Eigen::VectorXd p = populations(psi, 1.0, 8);
        REQUIRE_THAT(p[2], WithinAbs(1.0, 1e-10));
        for (int n : {0, 1, 3, 4, 5, 6, 7, 8}) REQUIRE(p[n] < 1e-10);
    }

    SECTION("equal superposition")
    {
        Eigen::VectorXcd amps = eigenstate(0, 1.0, grid).values() + eigenstate(1, 1.0, grid).values();
        const Wavefunction psi(grid, amps);
        const Eigen::VectorXd p = populations(psi, 1.0, 4);
        REQUIRE_THAT(p[0], WithinAbs(0.5, 1e-10));
        REQUIRE_THAT(p[1], WithinAbs(0.5, 1e-10));
    }

    SECTION("ground state analyzed at 4x frequency")
    {
        const Wavefunction psi = eigenstate(0, 1.0, grid);
        const Eigen::VectorXd p = populations(psi, 4.0, 8);
        // oracle: squared overlaps by grid quadrature of the reference states
        REQUIRE_THAT(std::pow(overlap_oracle(0, 0, 4.0, 1.0, grid), 2), WithinAbs(0.8, 1e-10));
        REQUIRE_THAT(std::pow(overlap_oracle(2, 0, 4.0, 1.0, grid), 2), WithinAbs(0.144, 1e-10));
        REQUIRE_THAT(p[0], WithinAbs(0.8, 1e-10));
        REQUIRE_THAT(p[2], WithinAbs(0.144, 1e-10));
        REQUIRE_THAT(p[1], WithinAbs(0.0, 1e-12));
        REQUIRE(p.sum() <= 1.0 + 1e-9);
    }
}

TEST_CASE("dt matrix elements")
{
    SECTION("closed-form values")
    {
        REQUIRE_THAT(dt_matrix_element(0, 2, 1.0, 1.0), WithinAbs(0.25 * std::sqrt(2.0), 1e-15));
        REQUIRE_THAT(dt_matrix_element(2, 0, 1.0, 1.0), WithinAbs(-0.25 * std::sqrt(2.0), 1e-15));
        REQUIRE(dt_matrix_element(1, 0, 1.0, 123.0) == 0.0);
        REQUIRE(dt_matrix_element(3, 3, 1.0, 123.0) == 0.0);
    }

    SECTION("antisymmetry")
    {
        for (int k = 0; k <= 10; ++k)
            for (int n = 0; n <= 10; ++n)
                REQUIRE_THAT(dt_matrix_element(k, n, 0.7, 0.3),
                             WithinAbs(-dt_matrix_element(n, k, 0.7, 0.3), 1e-15));
    }

    SECTION("agrees with finite differences of grid eigenstates")
    {
        const SpatialGrid grid = SpatialGrid::sized_for(1.0, {});
        const double omega = 1.0, omega_dot = 0.8, eps = 1e-5;
        for (int k = 0; k <= 8; ++k) {
            const Wavefunction bra = eigenstate(k, omega, grid);
            for (int n = 0; n <= 8; ++n) {
                const Wavefunction plus = eigenstate(n, omega + eps, grid);
                const Wavefunction minus = eigenstate(n, omega - eps, grid);
                const double fd =
                    ((inner_product(bra, plus) - inner_product(bra, minus)) / (2.0 * eps)).real() *
                    omega_dot;
                REQUIRE_THAT(dt_matrix_element(k, n, omega, omega_dot), WithinAbs(fd, 1e-6));
            }
        }
    }
}

TEST_CASE("quadratic expectations")
{
    const SpatialGrid grid = SpatialGrid::sized_for(0.5, {});

    SECTION("oscillator energies")
    {
        REQUIRE_THAT(quadratic_expectation(eigenstate(0, 1.0, grid),
                                           QuadraticHamiltonian::oscillator(1.0, {}), {}),
                     WithinAbs(0.5, 1e-10));
        for (double omega : {0.5, 1.0, 2.0})
            for (int n : {0, 1, 2, 5, 10}) {
                const double e = quadratic_expectation(
                    eigenstate(n, omega, grid), QuadraticHamiltonian::oscillator(omega, {}), {});
                REQUIRE_THAT(e, WithinRel(omega * (n + 0.5), 1e-7));
            }
    }

    SECTION("symmetrized xp vanishes on real states")
    {
        const double v =
            quadratic_expectation(eigenstate(0, 1.0, grid), {0.0, 0.0, 1.0}, {});
        REQUIRE_THAT(v, WithinAbs(0.0, 1e-10));
    }

    SECTION("scales with hbar and mass")
    {
        const UnitSystem u{2.0, 3.0};
        const SpatialGrid g = SpatialGrid::sized_for(1.5, u);
        const Wavefunction psi = eigenstate(2, 1.5, g, u);
        const double e = quadratic_expectation(psi, QuadraticHamiltonian::oscillator(1.5, u), u);
        REQUIRE_THAT(e, WithinRel(2.0 * 1.5 * 2.5, 1e-8)); // hbar omega (n + 1/2)
        const double x2 = quadratic_expectation(psi, {0.0, 1.0, 0.0}, u);
        REQUIRE_THAT(x2, WithinRel(2.5 * 2.0 / (3.0 * 1.5), 1e-8)); // (n+1/2) hbar/(m omega)
    }
}

TEST_CASE("orthonormality across frequencies")
{
    for (double omega : {0.01, 1.0, 100.0}) {
        const SpatialGrid grid = SpatialGrid::sized_for(omega, {});
        std::vector<Wavefunction> basis;
        for (int n = 0; n <= 10; ++n) basis.push_back(eigenstate(n, omega, grid));
        for (int m = 0; m <= 10; ++m)
            for (int n = 0; n <= 10; ++n) {
                const double expected = m == n ? 1.0 : 0.0;
                REQUIRE_THAT(std::abs(inner_product(basis[m], basis[n])),
                             WithinAbs(expected, 1e-9));
            }
    }
}

TEST_CASE("eigenstate error paths")
{
    const SpatialGrid narrow(3.0, 64); // comfortably too narrow for n=8
    REQUIRE_THROWS_AS(eigenstate(8, 0.05, narrow), InvalidInput);
    const SpatialGrid grid = SpatialGrid::sized_for(1.0, {});
    REQUIRE_THROWS_AS(eigenstate(65, 1.0, grid), InvalidInput);
    REQUIRE_THROWS_AS(eigenstate(-1, 1.0, grid), InvalidInput);
    REQUIRE_THROWS_AS(eigenstate(0, -1.0, grid), InvalidInput);
    // aliasing guard: huge omega on a coarse grid
    REQUIRE_THROWS_AS(eigenstate(10, 5000.0, grid), InvalidInput);
}

TEST_CASE("properties over generated states")
{
    const SpatialGrid grid = SpatialGrid::sized_for(1.0, {});
    Lcg rng(20240917);

    // random superposition with known coefficients, n <= 10
    auto random_state = [&](Eigen::VectorXcd* coeffs = nullptr) {
        Eigen::VectorXcd c(11);
        for (int n = 0; n <= 10; ++n)
            c[n] = std::complex<double>(rng.uniform(-1, 1), rng.uniform(-1, 1));
        c /= c.norm();
        Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(grid.size());
        for (int n = 0; n <= 10; ++n) amps += c[n] * eigenstate(n, 1.0, grid).values();
        if (coeffs) *coeffs = c;
        return Wavefunction(grid, amps);
    };

    SECTION("inner product: conjugate symmetry and Cauchy-Schwarz")
    {
        for (int trial = 0; trial < 20; ++trial) {
            const Wavefunction a = random_state();
            const Wavefunction b = random_state();
            const auto ab = inner_product(a, b);
            const auto ba = inner_product(b, a);
            REQUIRE_THAT(std::abs(ab - std::conj(ba)), WithinAbs(0.0, 1e-14));
            REQUIRE(std::abs(ab) <= 1.0 + 1e-12);
        }
    }

    SECTION("populations recover the generating coefficients")
    {
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXcd c;
            const Wavefunction psi = random_state(&c);
            const Eigen::VectorXd p = populations(psi, 1.0, 12);
            for (int n = 0; n <= 10; ++n) REQUIRE_THAT(p[n], WithinAbs(std::norm(c[n]), 1e-10));
            REQUIRE_THAT(p[11], WithinAbs(0.0, 1e-12));
            REQUIRE(p.sum() <= 1.0 + 1e-9);
            REQUIRE(p.minCoeff() >= 0.0);
        }
    }

    SECTION("dt matrix elements depend only on omega_dot/omega")
    {
        for (int trial = 0; trial < 20; ++trial) {
            const double omega = rng.uniform(0.2, 5.0);
            const double omega_dot = rng.uniform(-2.0, 2.0);
            const double lambda = rng.uniform(0.1, 10.0);
            for (int k = 0; k <= 6; ++k)
                for (int n = 0; n <= 6; ++n)
                    REQUIRE_THAT(dt_matrix_element(k, n, lambda * omega, lambda * omega_dot),
                                 WithinAbs(dt_matrix_element(k, n, omega, omega_dot), 1e-14));
        }
    }
}

TEST_CASE("spectral momentum application")
{
    const SpatialGrid grid = SpatialGrid::sized_for(1.0, {});
    SpectralWorkspace ws(grid);
    const Wavefunction psi = eigenstate(0, 1.0, grid);
    Eigen::VectorXcd ppsi(grid.size());
    ws.apply_momentum(psi.values(), ppsi, 1.0);
    // p psi_0 = -i hbar d/dx psi_0 = +i x psi_0 for the unit Gaussian
    for (int j = 0; j < grid.size(); j += 13) {
        const std::complex<double> expected =
            std::complex<double>(0.0, grid.points()[j]) * psi.values()[j];
        REQUIRE_THAT(std::abs(ppsi[j] - expected), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("band-limited coordinate rescaling matches direct evaluation")
{
    // Small grid so the direct O(N^2) chirp-z evaluation is cheap. The test
    // function is asymmetric on purpose (catches any phase-origin slip).
    const int n = 64;
    const SpatialGrid grid(8.0, n);
    Eigen::VectorXcd f(n);
    for (int j = 0; j < n; ++j) {
        const double x = grid.points()[j];
        f[j] = std::exp(-0.5 * (x - 0.7) * (x - 0.7)) *
               std::complex<double>(std::cos(0.3 * x), 0.2 * std::sin(x));
    }

    for (double r : {-0.35, 0.0, 0.2}) {
        // direct: trigonometric interpolant evaluated at e^r x_j
        Eigen::VectorXcd spec(n);
        Eigen::FFT<double> fft;
        fft.fwd(spec, f);
        const double s = std::exp(r);
        Eigen::VectorXcd direct(n);
        for (int j = 0; j < n; ++j) {
            const double y = s * grid.points()[j];
            std::complex<double> acc = 0.0;
            for (int mp = 0; mp < n; ++mp) {
                const int m = mp < n / 2 ? mp : mp - n;
                const double k = m * std::numbers::pi / grid.x_max();
                acc += spec[(m + n) % n] * std::polar(1.0, k * (y - (-grid.x_max())));
            }
            direct[j] = std::exp(0.5 * r) * acc / double(n);
        }

        Eigen::VectorXcd fast = f;
        SpectralWorkspace ws(grid);
        ws.scale_coordinates(fast, r);
        for (int j = 0; j < n; ++j)
            REQUIRE_THAT(std::abs(fast[j] - direct[j]), WithinAbs(0.0, 1e-11));
    }
}
