#pragma once

#include <memory>

#include "skgs/grid.hpp"
#include "skgs/sine_transform.hpp"
#include "skgs/tridiagonal.hpp"

namespace skgs {

enum class OperatorKind { CentralDiff, SineSpectral, Fem };

/// Discrete second derivative with homogeneous Dirichlet data on a Grid1D.
///
/// CentralDiff and SineSpectral are symmetric matrices acting on nodal
/// values, with the lattice inner product <f, g>_h = h sum f_i g_i. Both are
/// diagonalised by the orthonormal sine transform. Fem works on hat-function
/// coefficients: the stiffness K_h and mass M_h are stored, the operator
/// A_h = -M_h^{-1} K_h is only ever applied, and the inner product is the
/// consistent L2 pairing x^T M_h y.
///
/// Immutable after construction; copies share the sine-transform plan.
class SpatialOperator {
public:
    static SpatialOperator central_diff(const Grid1D& grid);
    static SpatialOperator sine_spectral(const Grid1D& grid);
    static SpatialOperator fem(const Grid1D& grid);

    OperatorKind kind() const { return kind_; }
    const Grid1D& grid() const { return grid_; }
    int size() const { return grid_.interior(); }

    Vec apply(const Vec& x) const;
    Eigen::MatrixXd matrix() const;

    double inner(const Vec& x, const Vec& y) const;
    double norm2(const Vec& x) const { return inner(x, x); }
    /// Inner product of x with the operator applied to y, in the matching pairing.
    double form(const Vec& x, const Vec& y) const;

    // Sine-diagonal kinds (CentralDiff, SineSpectral).
    bool sine_diagonal() const { return kind_ != OperatorKind::Fem; }
    const Vec& sine_eigenvalues() const;
    const SineTransform& sine_transform() const;
    /// A x through the sine transform, O(M log M).
    Vec apply_via_transform(const Vec& x) const;

    // Finite elements.
    const SymTridiag& stiffness() const;
    const SymTridiag& mass() const;
    /// N(w)_{jk} = integral of w * phi_j * phi_k for w in V_h (exact).
    SymTridiag weighted_mass(const Vec& w) const;
    /// Coefficients of the L2 projection of f onto V_h (two-point Gauss loads).
    Vec project_l2(const Profile& f) const;
    /// Load vector (f, phi_j) of a function, two-point Gauss per element.
    Vec load(const Profile& f) const;
    Vec solve_mass(const Vec& rhs) const;

private:
    SpatialOperator(OperatorKind kind, const Grid1D& grid);
    void require_fem(const char* what) const;

    OperatorKind kind_;
    Grid1D grid_;
    SymTridiag tri_;           // CentralDiff: A itself
    Eigen::MatrixXd dense_;    // SineSpectral: the csc^2 matrix
    SymTridiag stiffness_;     // Fem
    SymTridiag mass_;          // Fem
    TridiagonalLU<double> mass_lu_;
    Vec eigenvalues_;
    std::shared_ptr<const SineTransform> dst_;
};

enum class DiffSide { Forward, Backward };

/// First difference on interior nodes. Forward: (v_{i+1} - v_i)/h with
/// v_M = ghost. Backward: (v_i - v_{i-1})/h with v_0 = ghost. The default
/// ghost 0 is the homogeneous Dirichlet value.
Vec forward_diff(const Grid1D& grid, const Vec& v, DiffSide side = DiffSide::Forward,
                 double ghost = 0.0);

}  // namespace skgs
