#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace sta {

/// Orthonormal oscillator basis functions u_n(xi) = H_n(xi) e^{-xi^2/2} /
/// sqrt(2^n n! sqrt(pi)), generated by the normalized three-term recurrence
///   u_{n+1} = sqrt(2/(n+1)) xi u_n - sqrt(n/(n+1)) u_{n-1}.
/// Folding the Gaussian into the seed keeps every intermediate bounded, so the
/// evaluation neither overflows nor loses the tail for any reasonable n.
class HermiteLadder {
public:
    explicit HermiteLadder(const Eigen::ArrayXd& xi)
        : xi_(xi),
          prev_(Eigen::ArrayXd::Zero(xi.size())),
          curr_(std::pow(std::numbers::pi, -0.25) * (-0.5 * xi.square()).exp()),
          n_(0)
    {
    }

    int level() const { return n_; }
    const Eigen::ArrayXd& values() const { return curr_; }

    void ascend()
    {
        const double c1 = std::sqrt(2.0 / (n_ + 1.0));
        const double c2 = std::sqrt(n_ / (n_ + 1.0));
        Eigen::ArrayXd next = c1 * xi_ * curr_ - c2 * prev_;
        prev_.swap(curr_);
        curr_.swap(next);
        ++n_;
    }

    /// Values of u_n on the stored abscissae, advancing from the current level.
    const Eigen::ArrayXd& ascend_to(int n)
    {
        while (n_ < n) ascend();
        return curr_;
    }

private:
    Eigen::ArrayXd xi_;
    Eigen::ArrayXd prev_;
    Eigen::ArrayXd curr_;
    int n_;
};

} // namespace sta
