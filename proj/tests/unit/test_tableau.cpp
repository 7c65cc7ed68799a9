#include <doctest.h>

#include <cmath>

#include "skgs/tableau.hpp"

using namespace skgs;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Collocation tableau on given nodes: a_ij = int_0^{c_i} L_j, b_j = int_0^1 L_j.
void collocation(const VectorXd& c, MatrixXd& a, VectorXd& b) {
    const int s = static_cast<int>(c.size());
    MatrixXd V(s, s), C(s, s);
    VectorXd B(s);
    for (int j = 0; j < s; ++j) {
        for (int k = 0; k < s; ++k) {
            V(j, k) = std::pow(c[j], k);
            C(j, k) = std::pow(c[j], k + 1) / (k + 1);
        }
    }
    for (int k = 0; k < s; ++k) B[k] = 1.0 / (k + 1);
    const MatrixXd Vinv = V.inverse();
    a = C * Vinv;
    b = (B.transpose() * Vinv).transpose();
}

}  // namespace

TEST_SUITE("tableau") {

TEST_CASE("Gauss nodes and weights") {
    VectorXd c, w;
    gauss_legendre_01(3, c, w);
    CHECK(c[0] == doctest::Approx(0.5 - std::sqrt(15.0) / 10.0).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w[0] == doctest::Approx(5.0 / 18.0).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(8.0 / 18.0).epsilon(1e-15));
    gauss_legendre_01(5, c, w);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-15));
    // degree 9 exactness
    double integral = 0.0;
    for (int i = 0; i < 5; ++i) integral += w[i] * std::pow(c[i], 9);
    CHECK(integral == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("shifted Legendre polynomials are orthonormal") {
    VectorXd c, w;
    gauss_legendre_01(6, c, w);
    for (int i = 1; i <= 4; ++i) {
        for (int j = 1; j <= 4; ++j) {
            double ip = 0.0;
            for (int q = 0; q < 6; ++q) ip += w[q] * shifted_legendre(i, c[q]) * shifted_legendre(j, c[q]);
            CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("alpha = 0 gives Gauss collocation") {
    for (int s : {1, 2, 3, 4}) {
        const ButcherTableau t = make_parametric_tableau(s, {});
        MatrixXd a;
        VectorXd b;
        collocation(t.c, a, b);
        CHECK((t.a - a).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((t.b - b).cwiseAbs().maxCoeff() < 1e-14);
    }
    const ButcherTableau one = make_parametric_tableau(1, {});
    CHECK(one.a(0, 0) == 0.5);
    CHECK(one.b[0] == 1.0);
}

TEST_CASE("s = 2 closed form") {
    for (double alpha : {0.0, 0.001, 0.1, -0.3}) {
        const ButcherTableau t = make_parametric_tableau(2, {alpha});
        const double beta = std::sqrt(3.0) / 6.0 + alpha;
        CHECK(t.a(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(t.a(0, 1) == doctest::Approx(0.25 - beta).epsilon(1e-14));
        CHECK(t.a(1, 0) == doctest::Approx(0.25 + beta).epsilon(1e-14));
        CHECK(t.a(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(t.b[0] == 0.5);
        CHECK(t.b[1] == 0.5);
    }
}

TEST_CASE("family is symplectic and keeps the quadrature") {
    for (int s : {2, 3, 4}) {
        for (double alpha : {-0.5, 0.0, 0.001, 0.1, 1.0, 3.0}) {
            const ButcherTableau t = make_parametric_tableau(s, std::vector<double>(s - 1, alpha));
            const MatrixXd B = t.b.asDiagonal();
            const MatrixXd defect = B * t.a + t.a.transpose() * B - t.b * t.b.transpose();
            CHECK(defect.cwiseAbs().maxCoeff() < 1e-12);
            CHECK(t.symplectic_defect() == doctest::Approx(defect.cwiseAbs().maxCoeff()).epsilon(1e-6).scale(1e-12));
            CHECK(t.b.sum() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(t.b.dot(t.c) == doctest::Approx(0.5).epsilon(1e-15));
        }
    }
}

TEST_CASE("a nonzero parameter changes the method") {
    const ButcherTableau g = make_parametric_tableau(3, {0.0, 0.0});
    const ButcherTableau t = make_parametric_tableau(3, {0.1, 0.0});
    CHECK((g.a - t.a).cwiseAbs().maxCoeff() > 1e-3);
}

}
