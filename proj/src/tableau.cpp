#include "skgs/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "skgs/error.hpp"

namespace skgs {

double ButcherTableau::symplectic_defect() const {
    const Eigen::MatrixXd B = b.asDiagonal();
    return (B * a + a.transpose() * B - b * b.transpose()).cwiseAbs().maxCoeff();
}

namespace {

// Legendre P_n and its derivative on [-1, 1] by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_legendre_01(int s, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    if (s < 1) throw UsageError("Gauss-Legendre rule needs at least one node");
    nodes.resize(s);
    weights.resize(s);
    for (int i = 0; i < s; ++i) {
        // Chebyshev-like starting guess for the (i+1)-th largest root, then Newton.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (s + 0.5));
        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre(s, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre(s, x, p, dp);
        // Roots come out descending in x; map to ascending tau on [0, 1].
        nodes[s - 1 - i] = 0.5 * (1.0 + x);
        weights[s - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

double shifted_legendre(int i, double tau) {
    double p = 0.0, dp = 0.0;
    const double x = 2.0 * tau - 1.0;
    if (i == 1) return 1.0;
    if (std::abs(x) == 1.0) {
        p = (x > 0.0 || (i - 1) % 2 == 0) ? 1.0 : -1.0;
    } else {
        legendre(i - 1, x, p, dp);
    }
    return std::sqrt(2.0 * i - 1.0) * p;
}

ButcherTableau make_parametric_tableau(int s, const std::vector<double>& alpha) {
    if (s < 1) throw UsageError("tableau needs s >= 1");
    if (alpha.size() > static_cast<std::size_t>(std::max(0, s - 1))) {
        throw UsageError("tableau: at most s-1 alpha parameters");
    }
    auto alpha_at = [&](int k) { return k < static_cast<int>(alpha.size()) ? alpha[k] : 0.0; };

    ButcherTableau tab;
    tab.s = s;
    gauss_legendre_01(s, tab.c, tab.b);

    if (s == 2) {
        const double beta = std::sqrt(3.0) / 6.0 + alpha_at(0);
        tab.a.resize(2, 2);
        tab.a << 0.25, 0.25 - beta, 0.25 + beta, 0.25;
        tab.b << 0.5, 0.5;
        tab.c << 0.5 - std::sqrt(3.0) / 6.0, 0.5 + std::sqrt(3.0) / 6.0;
        return tab;
    }

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(s, s);
    X(0, 0) = 0.5;
    for (int k = 1; k < s; ++k) {
        const double xi = 0.5 / std::sqrt((2.0 * k + 1.0) * (2.0 * k - 1.0));
        X(k, k - 1) = xi + alpha_at(k - 1);
        X(k - 1, k) = -(xi + alpha_at(k - 1));
    }
    Eigen::MatrixXd l(s, s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) l(i, j) = shifted_legendre(j + 1, tab.c[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(l);
    if (!lu.isInvertible()) throw NumericalError("tableau: Legendre basis matrix is singular");
    tab.a = l * X * lu.inverse();
    return tab;
}

}  // namespace skgs
