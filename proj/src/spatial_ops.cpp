#include "skgs/spatial_ops.hpp"

#include <cmath>
#include <numbers>

#include "skgs/error.hpp"

namespace skgs {

Eigen::MatrixXd SymTridiag::dense() const {
    const int n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = diag[i];
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off[i];
    }
    return m;
}

TridiagonalLU<double> factorize(const SymTridiag& m) {
    return TridiagonalLU<double>(m.off, m.diag, m.off);
}

TridiagonalLU<std::complex<double>> factorize_complex(const SymTridiag& m_mat, double tau,
                                                      const SymTridiag& s_mat) {
    using CVec = Eigen::VectorXcd;
    const std::complex<double> it(0.0, tau);
    const CVec diag = m_mat.diag.cast<std::complex<double>>() + it * s_mat.diag;
    const CVec off = m_mat.off.cast<std::complex<double>>() + it * s_mat.off;
    return TridiagonalLU<std::complex<double>>(off, diag, off);
}

namespace {

// Two-point Gauss on [0, 1].
constexpr double kGaussLo = 0.5 - 0.28867513459481287;  // 1/2 - 1/(2 sqrt 3)
constexpr double kGaussHi = 0.5 + 0.28867513459481287;

}  // namespace

SpatialOperator::SpatialOperator(OperatorKind kind, const Grid1D& grid)
    : kind_(kind), grid_(grid) {}

SpatialOperator SpatialOperator::central_diff(const Grid1D& grid) {
    SpatialOperator op(OperatorKind::CentralDiff, grid);
    const int n = grid.interior();
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    op.tri_.diag = Vec::Constant(n, -2.0 * inv_h2);
    op.tri_.off = Vec::Constant(n - 1, inv_h2);
    op.eigenvalues_.resize(n);
    for (int k = 1; k <= n; ++k) {
        const double s = std::sin(k * std::numbers::pi / (2.0 * grid.M));
        op.eigenvalues_[k - 1] = -4.0 * inv_h2 * s * s;
    }
    op.dst_ = std::make_shared<SineTransform>(n);
    return op;
}

SpatialOperator SpatialOperator::sine_spectral(const Grid1D& grid) {
    SpatialOperator op(OperatorKind::SineSpectral, grid);
    const int n = grid.interior();
    const int M = grid.M;
    const double mu = std::numbers::pi / (grid.b - grid.a);
    const double mu2 = mu * mu;
    const double h = grid.h;
    auto csc2 = [](double arg) {
        const double s = std::sin(arg);
        if (!(std::abs(s) > 1e-300)) {
            throw NumericalError("sine-spectral assembly hit a singular csc^2 argument");
        }
        return 1.0 / (s * s);
    };
    op.dense_.resize(n, n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            double v;
            if (i == j) {
                v = -mu2 / 6.0 - M * M * mu2 / 3.0 + 0.5 * mu2 * csc2(i * mu * h);
            } else {
                const double sign = ((i + j + 1) % 2 == 0) ? 1.0 : -1.0;
                v = sign * 0.5 * mu2 *
                    (csc2(0.5 * mu * (i - j) * h) - csc2(0.5 * mu * (i + j) * h));
            }
            op.dense_(i - 1, j - 1) = v;
        }
    }
    op.eigenvalues_.resize(n);
    for (int k = 1; k <= n; ++k) op.eigenvalues_[k - 1] = -(k * mu) * (k * mu);
    op.dst_ = std::make_shared<SineTransform>(n);
    return op;
}

SpatialOperator SpatialOperator::fem(const Grid1D& grid) {
    SpatialOperator op(OperatorKind::Fem, grid);
    const int n = grid.interior();
    const double h = grid.h;
    op.stiffness_.diag = Vec::Constant(n, 2.0 / h);
    op.stiffness_.off = Vec::Constant(n - 1, -1.0 / h);
    op.mass_.diag = Vec::Constant(n, 4.0 * h / 6.0);
    op.mass_.off = Vec::Constant(n - 1, h / 6.0);
    op.mass_lu_ = factorize(op.mass_);
    return op;
}

void SpatialOperator::require_fem(const char* what) const {
    if (kind_ != OperatorKind::Fem) {
        throw UsageError(std::string(what) + " is only defined for the finite element operator");
    }
}

Vec SpatialOperator::apply(const Vec& x) const {
    if (x.size() != size()) throw UsageError("operator apply: length mismatch");
    switch (kind_) {
        case OperatorKind::CentralDiff: return tri_.multiply(x);
        case OperatorKind::SineSpectral: return dense_ * x;
        case OperatorKind::Fem: return -solve_mass(stiffness_.multiply(x));
    }
    return {};
}

Eigen::MatrixXd SpatialOperator::matrix() const {
    switch (kind_) {
        case OperatorKind::CentralDiff: return tri_.dense();
        case OperatorKind::SineSpectral: return dense_;
        case OperatorKind::Fem: {
            const Eigen::MatrixXd K = stiffness_.dense();
            return -mass_.dense().llt().solve(K);
        }
    }
    return {};
}

double SpatialOperator::inner(const Vec& x, const Vec& y) const {
    if (kind_ == OperatorKind::Fem) return x.dot(mass_.multiply(y));
    return grid_.h * x.dot(y);
}

double SpatialOperator::form(const Vec& x, const Vec& y) const {
    switch (kind_) {
        case OperatorKind::CentralDiff: return grid_.h * x.dot(tri_.multiply(y));
        case OperatorKind::SineSpectral: return grid_.h * x.dot(dense_ * y);
        case OperatorKind::Fem: return -x.dot(stiffness_.multiply(y));
    }
    return 0.0;
}

const Vec& SpatialOperator::sine_eigenvalues() const {
    if (!sine_diagonal()) throw UsageError("finite element operator is not sine-diagonal");
    return eigenvalues_;
}

const SineTransform& SpatialOperator::sine_transform() const {
    if (!sine_diagonal()) throw UsageError("finite element operator is not sine-diagonal");
    return *dst_;
}

Vec SpatialOperator::apply_via_transform(const Vec& x) const {
    const SineTransform& s = sine_transform();
    Vec coeff = s.apply(x);
    coeff.array() *= eigenvalues_.array();
    return s.apply(coeff);
}

const SymTridiag& SpatialOperator::stiffness() const {
    require_fem("stiffness");
    return stiffness_;
}

const SymTridiag& SpatialOperator::mass() const {
    require_fem("mass");
    return mass_;
}

SymTridiag SpatialOperator::weighted_mass(const Vec& w) const {
    require_fem("weighted_mass");
    const int n = size();
    if (w.size() != n) throw UsageError("weighted_mass: length mismatch");
    const double h = grid_.h;
    SymTridiag out{Vec::Zero(n), Vec::Zero(n - 1)};
    // Element e spans nodes e and e+1 (global numbering 0..M); node k maps to
    // unknown k-1 and boundary nodes carry zero.
    auto coef = [&](int node) { return (node <= 0 || node >= grid_.M) ? 0.0 : w[node - 1]; };
    for (int e = 0; e < grid_.M; ++e) {
        const double wl = coef(e);
        const double wr = coef(e + 1);
        double m00 = 0.0, m01 = 0.0, m11 = 0.0;
        for (double xi : {kGaussLo, kGaussHi}) {
            const double phi0 = 1.0 - xi;
            const double phi1 = xi;
            const double wx = wl * phi0 + wr * phi1;
            m00 += 0.5 * h * wx * phi0 * phi0;
            m01 += 0.5 * h * wx * phi0 * phi1;
            m11 += 0.5 * h * wx * phi1 * phi1;
        }
        const int left = e - 1;   // unknown index of node e
        const int right = e;      // unknown index of node e+1
        if (e >= 1) out.diag[left] += m00;
        if (e + 1 <= n) out.diag[right] += m11;
        if (e >= 1 && e + 1 <= n) out.off[left] += m01;
    }
    return out;
}

Vec SpatialOperator::load(const Profile& f) const {
    require_fem("load");
    const int n = size();
    const double h = grid_.h;
    Vec out = Vec::Zero(n);
    for (int e = 0; e < grid_.M; ++e) {
        const double x0 = grid_.node(e);
        for (double xi : {kGaussLo, kGaussHi}) {
            const double fx = f(x0 + xi * h);
            if (e >= 1) out[e - 1] += 0.5 * h * fx * (1.0 - xi);
            if (e + 1 <= n) out[e] += 0.5 * h * fx * xi;
        }
    }
    return out;
}

Vec SpatialOperator::project_l2(const Profile& f) const {
    return solve_mass(load(f));
}

Vec SpatialOperator::solve_mass(const Vec& rhs) const {
    require_fem("solve_mass");
    return mass_lu_.solve(rhs);
}

Vec forward_diff(const Grid1D& grid, const Vec& v, DiffSide side, double ghost) {
    const int n = grid.interior();
    if (v.size() != n) throw UsageError("forward_diff: length mismatch");
    Vec out(n);
    const double inv_h = 1.0 / grid.h;
    if (side == DiffSide::Forward) {
        for (int i = 0; i < n; ++i) {
            const double next = (i + 1 < n) ? v[i + 1] : ghost;
            out[i] = (next - v[i]) * inv_h;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double prev = (i > 0) ? v[i - 1] : ghost;
            out[i] = (v[i] - prev) * inv_h;
        }
    }
    return out;
}

}  // namespace skgs
