#pragma once

#include <optional>

#include <Eigen/Dense>

#include "skgs/integrators.hpp"
#include "skgs/tridiagonal.hpp"

namespace skgs {

using CVec = Eigen::VectorXcd;

/// Charge/energy preserving linearly implicit schemes (CFD, SPS, FEM; first
/// and midpoint variants). One step is an explicit noise kick followed by a
/// deterministic substep with two linear solves: a real solve for the wave
/// field and a complex one for phi = P + iQ.
///
/// All three spatial discretizations are handled in weak form with mass M,
/// stiffness K and weighted mass N(w) (M = I, K = -A, N(w) = diag(w) for
/// the nodal schemes).
class LinearlyImplicitStepper final : public Stepper {
public:
    LinearlyImplicitStepper(const SchemeConfig& cfg, std::shared_ptr<const SpatialOperator> op,
                            const PhysicsParams& params);

    Scheme scheme() const override { return scheme_; }
    void step(FieldState& state, const NoiseIncrement& inc, StepTrace* trace = nullptr) override;
    void step_with_tangents(FieldState& state, const NoiseIncrement& inc,
                            std::span<FieldState> tangents) override;

    /// Solves (M - i dt/2 S) phi1 = (M + i dt/2 S) phibar with S = -K + N(W).
    CVec solve_phi(const CVec& phibar, const Vec& W) const;

    const Vec& eta1() const { return e1_; }
    const Vec& eta2() const { return e2_; }

private:
    class PhiSystem;

    FieldState kick(const FieldState& s, const NoiseIncrement& inc) const;
    Vec wave_load(const FieldState& pre, const FieldState& kicked, const NoiseIncrement& inc) const;
    Vec wave_load_tangent(const FieldState& pre, const FieldState& kicked, const FieldState& d,
                          const NoiseIncrement& inc) const;
    Vec solve_u(const Vec& Ubar, const Vec& Vbar, const Vec& G) const;
    void advance(FieldState& state, const NoiseIncrement& inc, StepTrace* trace,
                 std::span<FieldState> tangents);

    SymTridiag nweights(const Vec& w) const;
    Vec mass_mul(const Vec& x) const;
    Vec nmul(const Vec& w, const Vec& x) const;
    Vec stiff_plus_mass_mul(const Vec& x) const;

    Scheme scheme_;
    NoiseCoupling coupling_;
    bool midpoint_;
    const PhysicsParams params_;
    Vec e1_, e2_;

    // Tridiagonal representation (central differences and finite elements).
    bool tri_ = false;
    SymTridiag mass_;
    SymTridiag stiff_;
    TridiagonalLU<double> wave_lu_;
    // Sine-spectral: modal factors of the wave solve.
    Vec wave_lhs_, wave_rhs_;
};

/// Applies the orthonormal sine transform to real and imaginary parts.
CVec sine_transform_complex(const SineTransform& s, const CVec& x);

}  // namespace skgs
