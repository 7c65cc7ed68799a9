#pragma once

#include <memory>
#include <span>

#include "skgs/grid.hpp"

namespace skgs {

/// Orthonormal type-I discrete sine transform on n = M-1 points,
///   (S x)_k = sqrt(2/M) * sum_j x_j sin(pi j k / M),   j, k = 1..M-1.
/// S is symmetric and S*S = I, so the same call maps nodal values to sine
/// coefficients and back. Backed by FFTW's RODFT00; safe to call from
/// several threads at once.
class SineTransform {
public:
    explicit SineTransform(int n);

    int size() const { return n_; }
    void apply(std::span<const double> in, std::span<double> out) const;
    Vec apply(const Vec& x) const;

private:
    struct Plan;
    int n_;
    double scale_;
    std::shared_ptr<Plan> plan_;
};

}  // namespace skgs
