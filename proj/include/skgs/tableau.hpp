#pragma once

#include <vector>

#include <Eigen/Dense>

namespace skgs {

struct ButcherTableau {
    int s = 1;
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd c;  // abscissae; for the parametric family these are the Gauss nodes

    /// max |diag(b) a + a^T diag(b) - b b^T|
    double symplectic_defect() const;
};

/// Gauss-Legendre nodes and weights on [0, 1], ascending.
void gauss_legendre_01(int s, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Orthonormal shifted Legendre polynomial l_i (degree i-1) on [0, 1], i >= 1.
double shifted_legendre(int i, double tau);

/// Symplectic family A(alpha) = l X_s(alpha) l^{-1} built on the s Gauss nodes.
/// alpha holds s-1 parameters (missing entries read as 0); all zeros gives
/// the Gauss collocation method. s = 2 uses the closed form.
ButcherTableau make_parametric_tableau(int s, const std::vector<double>& alpha);

}  // namespace skgs
