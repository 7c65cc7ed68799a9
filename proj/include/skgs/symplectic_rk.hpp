#pragma once

#include <vector>

#include <Eigen/Dense>

#include "skgs/integrators.hpp"
#include "skgs/tableau.hpp"

namespace skgs {

/// Symplectic Runge-Kutta in time for the nodal system
///   dq = ( k A p + U p) dt - C1 eta1 dB0
///   dp = -(k A q + U q) dt + C1 eta1 dB1
///   dv = 1/2 ((A - I) u + p^2 + q^2) dt + 1/2 C2 eta2 dB2
///   du = 2 v dt
/// with k = srk_laplacian_weight for FD_SRK and k = 1 for MSFD (whose
/// velocity variable r = 2v). Increments enter every stage through the a
/// row sums and the final update through the b weights.
///
/// Stage equations are solved by fixed-point iteration on the nonlinear
/// terms only: the linear part is inverted exactly per sine mode, where A is
/// diagonal, so the iteration contracts at a rate set by dt * max|U| rather
/// than by dt * |A|.
class SymplecticRkStepper : public Stepper {
public:
    SymplecticRkStepper(const SchemeConfig& cfg, std::shared_ptr<const SpatialOperator> op,
                        const PhysicsParams& params);

    Scheme scheme() const override { return scheme_; }
    void step(FieldState& state, const NoiseIncrement& inc, StepTrace* trace = nullptr) override;
    void step_with_tangents(FieldState& state, const NoiseIncrement& inc,
                            std::span<FieldState> tangents) override;

    const ButcherTableau& tableau() const { return tab_; }
    double laplacian_weight() const { return kappa_; }
    int last_iterations() const { return last_iterations_; }
    double last_residual() const { return last_residual_; }

private:
    // Stage values, one column per stage.
    struct Stages {
        Eigen::MatrixXd q, p, v, u;
    };

    Stages solve_stages(const FieldState& y0, const NoiseIncrement& inc);
    Stages solve_tangent_stages(const Stages& Y, const FieldState& d) const;
    void modal_solve(const Eigen::MatrixXd& rq, const Eigen::MatrixXd& rp,
                     const Eigen::MatrixXd& rv, const Eigen::MatrixXd& ru, Stages& out) const;
    Eigen::MatrixXd to_modal(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd to_nodal(const Eigen::MatrixXd& x) const;
    Vec final_u(const Vec& u0, const Eigen::MatrixXd& v) const;

    Scheme scheme_;
    ButcherTableau tab_;
    double kappa_;
    bool literal_mix_;
    double fp_tol_;
    int fp_max_iter_;
    PhysicsParams params_;
    std::vector<Eigen::MatrixXd> inv_qp_;  // per mode, 2s x 2s
    std::vector<Eigen::MatrixXd> inv_vu_;
    Vec literal_u0_;  // U at the start of the current step
    int last_iterations_ = 0;
    double last_residual_ = 0.0;
};

/// Multi-symplectic field variables at the interior nodes: phi = p + iq,
/// f + ig ~ phi_x, u, r ~ u_t, w ~ u_x. The first differences use the
/// backward quotient with zero left ghost, so that the forward difference of
/// them, with the Dirichlet-consistent right ghost -P_{M-1}/h, is the
/// central second difference.
struct MultiSymState {
    Vec P, Q, F, G, U, R, W;
    double t = 0.0;
};

MultiSymState to_multisym(const FieldState& s, const Grid1D& grid);
FieldState from_multisym(const MultiSymState& z);
/// max over nodes of |delta P - F|, |delta Q - G|, |delta U - W|.
double closure_residual(const MultiSymState& z, const Grid1D& grid);
/// One MSFD step on the septuple state; the closure relations are restored
/// from the updated P, Q, U.
void step_multisym(Stepper& msfd, MultiSymState& z, const NoiseIncrement& inc);

}  // namespace skgs
