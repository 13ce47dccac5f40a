#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "sta/grid.hpp"

namespace sta {

/// FFT scratch space tied to one grid. Forward transforms are unscaled and the
/// inverse carries the 1/N factor, i.e. the usual DFT pair
///   F_m = sum_j f_j e^{-2 pi i m j / N},   f_j = (1/N) sum_m F_m e^{+2 pi i m j / N}.
/// One workspace per propagation run; the class holds mutable buffers and is
/// not meant to be shared between threads.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(const SpatialGrid& grid)
        : grid_(grid), spec_(grid.size())
    {
    }

    const SpatialGrid& grid() const { return grid_; }

    void forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { fft_.fwd(out, in); }
    void inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { fft_.inv(out, in); }

    /// out = (p psi) with p applied spectrally: multiply by hbar*k mode-wise.
    void apply_momentum(const Eigen::VectorXcd& in, Eigen::VectorXcd& out, double hbar)
    {
        fft_.fwd(spec_, in);
        const auto& k = grid_.wavenumbers();
        for (int m = 0; m < grid_.size(); ++m) spec_[m] *= hbar * k[m];
        fft_.inv(out, spec_);
    }

    /// In-place band-limited rescaling psi(x) <- e^{r/2} psi(e^r x).
    ///
    /// The trigonometric interpolant of psi is evaluated at the scaled points
    /// e^r x_j, which form a geometric phase progression in the mode sum; that
    /// sum is a chirp-z transform and is carried out with Bluestein's
    /// convolution trick in O(N log N). Exact (to roundoff) for states whose
    /// spectrum is resolved by the grid.
    ///
    /// Points that land outside the domain wrap around periodically. That is
    /// harmless for decaying states as long as the scale factor stays below
    /// ~1.5 per pass (beyond that the wrapped points reach back into the
    /// occupied center), so larger compressions are composed from sub-steps;
    /// the dilations form a one-parameter group, making the composition exact.
    ///
    /// Modes above 0.9x Nyquist are dropped on the way through. States that
    /// carry content there are unresolved on this grid in the first place
    /// (the eigenstate constructors enforce the same bound), and keeping the
    /// band turns roundoff noise into a slowly but exponentially growing
    /// parasite when rescalings alternate with other substeps in a long
    /// propagation: the truncated chirp convolution has above-unity gain for
    /// the outermost bins.
    void scale_coordinates(Eigen::VectorXcd& psi, double r)
    {
        if (r == 0.0) return;
        if (r > kMaxLogScalePerPass) {
            const int pieces = int(std::ceil(r / kMaxLogScalePerPass));
            for (int i = 0; i < pieces; ++i) scale_once(psi, r / pieces);
            return;
        }
        scale_once(psi, r);
    }

private:
    static constexpr double kMaxLogScalePerPass = 0.4;
    static constexpr double kSpectralCutoff = 0.9; // fraction of Nyquist kept

    void scale_once(Eigen::VectorXcd& psi, double r)
    {
        const int n = grid_.size();
        const int big = 2 * n;
        const double s = std::exp(r);
        const double sigma = 2.0 * std::numbers::pi * s / n;

        fft_.fwd(spec_, psi);

        // a_{m'} = psihat_m e^{i(-pi m (s-1) + sigma m^2/2)}, m = m' - n/2 signed.
        const double m_keep = kSpectralCutoff * 0.5 * n;
        a_.setZero(big);
        for (int mp = 0; mp < n; ++mp) {
            const double m = mp - n / 2;
            if (std::abs(m) > m_keep) continue;
            const int src = (mp + n / 2) % n; // FFT bin holding signed mode m
            const double phase = m * (-std::numbers::pi * (s - 1.0) + 0.5 * sigma * m);
            a_[mp] = spec_[src] * std::polar(1.0, phase);
        }

        // Chirp kernel K_l = e^{-i sigma (l + n/2)^2 / 2}, l = j - m' in
        // [-(n-1), n-1], wrapped into a length-2n circular buffer. The kernel
        // depends on r only, so reuse it when the same r repeats (the two
        // dilation half-steps of one splitting step share it).
        if (r != kernel_r_) {
            b_.setZero(big);
            for (int l = -(n - 1); l <= n - 1; ++l) {
                const double q = l + 0.5 * n;
                b_[(l + big) % big] = std::polar(1.0, -0.5 * sigma * q * q);
            }
            fft_.fwd(fb_, b_);
            kernel_r_ = r;
        }

        fft_.fwd(fa_, a_);
        fa_ = fa_.cwiseProduct(fb_);
        fft_.inv(a_, fa_);

        const double amp = std::exp(0.5 * r) / n;
        for (int j = 0; j < n; ++j)
            psi[j] = amp * std::polar(1.0, 0.5 * sigma * double(j) * double(j)) * a_[j];
    }

    SpatialGrid grid_;
    Eigen::FFT<double> fft_;
    Eigen::VectorXcd spec_;
    Eigen::VectorXcd a_, b_, fa_, fb_;
    double kernel_r_ = std::numeric_limits<double>::quiet_NaN();
};

} // namespace sta
