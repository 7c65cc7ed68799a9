#pragma once

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "skgs/error.hpp"
#include "skgs/grid.hpp"

namespace skgs {

/// Symmetric tridiagonal matrix: `diag` has n entries, `off` has n-1.
struct SymTridiag {
    Vec diag;
    Vec off;

    int size() const { return static_cast<int>(diag.size()); }

    template <typename Derived>
    auto multiply(const Eigen::MatrixBase<Derived>& x) const {
        using Scalar = typename Derived::Scalar;
        const int n = size();
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n);
        for (int i = 0; i < n; ++i) {
            Scalar v = diag[i] * x[i];
            if (i > 0) v += off[i - 1] * x[i - 1];
            if (i + 1 < n) v += off[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }

    SymTridiag scaled(double s) const { return {diag * s, off * s}; }
    SymTridiag plus(const SymTridiag& o, double s = 1.0) const {
        return {diag + s * o.diag, off + s * o.off};
    }
    Eigen::MatrixXd dense() const;
};

/// Thomas algorithm, no pivoting. Intended for matrices whose Hermitian part
/// is positive definite (SPD systems and M - i tau S with M SPD), for which
/// elimination without pivoting is stable.
template <typename Scalar>
class TridiagonalLU {
public:
    TridiagonalLU() = default;

    TridiagonalLU(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper)
        : lower_(lower), upper_(upper), pivots_(diag.size()) {
        const Eigen::Index n = diag.size();
        Scalar d = diag[0];
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i > 0) d = diag[i] - lower_[i - 1] * upper_[i - 1] / pivots_[i - 1];
            if (!(std::abs(d) > 0.0) || !std::isfinite(std::abs(d))) {
                throw NumericalError("tridiagonal solve: zero pivot at row " + std::to_string(i));
            }
            pivots_[i] = d;
        }
    }

    template <typename Rhs>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve(const Rhs& rhs) const {
        const Eigen::Index n = pivots_.size();
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n);
        y[0] = rhs[0];
        for (Eigen::Index i = 1; i < n; ++i) {
            y[i] = Scalar(rhs[i]) - lower_[i - 1] / pivots_[i - 1] * y[i - 1];
        }
        y[n - 1] /= pivots_[n - 1];
        for (Eigen::Index i = n - 2; i >= 0; --i) {
            y[i] = (y[i] - upper_[i] * y[i + 1]) / pivots_[i];
        }
        return y;
    }

private:
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lower_;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> upper_;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> pivots_;
};

TridiagonalLU<double> factorize(const SymTridiag& m);

/// Factorizes m_mat + i * tau * s_mat (both real symmetric tridiagonal).
TridiagonalLU<std::complex<double>> factorize_complex(const SymTridiag& m_mat, double tau,
                                                      const SymTridiag& s_mat);

}  // namespace skgs
