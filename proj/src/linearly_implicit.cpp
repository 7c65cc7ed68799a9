#include "skgs/linearly_implicit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "skgs/error.hpp"

namespace skgs {

namespace {

constexpr std::complex<double> kI(0.0, 1.0);

// Below this size a dense complex LU is cheaper than the preconditioned
// iteration with its sine transforms.
constexpr int kDenseLimit = 96;

CVec make_complex(const Vec& re, const Vec& im) {
    CVec z(re.size());
    z.real() = re;
    z.imag() = im;
    return z;
}

}  // namespace

CVec sine_transform_complex(const SineTransform& s, const CVec& x) {
    const Vec re = s.apply(Vec(x.real()));
    const Vec im = s.apply(Vec(x.imag()));
    return make_complex(re, im);
}

// The phi-system (M - i tau S) x = b for one step, S = -K + N(W).
// Tridiagonal kinds factor once; the sine-spectral kind iterates on the
// diagonal preconditioner I - i tau A~ (exact in the sine basis) and falls
// back to a dense LU when the coupling is too strong for that to contract.
class LinearlyImplicitStepper::PhiSystem {
public:
    PhiSystem(const LinearlyImplicitStepper& st, const Vec& W)
        : st_(st), tau_(0.5 * st.dt()), W_(W) {
        if (st.tri_) {
            S_ = st.stiff_.scaled(-1.0).plus(st.nweights(W));
            lu_ = factorize_complex(st.mass_, -tau_, S_);
        } else {
            const Vec& lam = st.op().sine_eigenvalues();
            precond_.resize(lam.size());
            for (Eigen::Index k = 0; k < lam.size(); ++k) {
                precond_[k] = 1.0 / (1.0 - kI * tau_ * lam[k]);
            }
            contraction_ = tau_ * (W.size() > 0 ? W.cwiseAbs().maxCoeff() : 0.0);
            if (W.size() <= kDenseLimit || contraction_ > 0.5) build_dense();
        }
    }

    // (M + i tau S) y
    CVec explicit_side(const CVec& y) const {
        if (st_.tri_) return st_.mass_.multiply(y) + kI * tau_ * S_.multiply(y);
        return y + kI * tau_ * (spectral_apply(y) + W_.cwiseProduct(y));
    }

    // N(w) y
    CVec weighted(const Vec& w, const CVec& y) const {
        if (st_.op().kind() == OperatorKind::Fem) return st_.op().weighted_mass(w).multiply(y);
        return w.cwiseProduct(y);
    }

    CVec solve(const CVec& b) const {
        if (st_.tri_) return lu_->solve(b);
        if (dense_) return dense_->solve(b);
        constexpr double eps = std::numeric_limits<double>::epsilon();
        CVec x = precondition(b);
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200; ++it) {
            CVec next = precondition(b + kI * tau_ * W_.cwiseProduct(x));
            const double diff = (next - x).cwiseAbs().maxCoeff();
            const double scale = std::max(next.cwiseAbs().maxCoeff(), 1e-300);
            x = std::move(next);
            if (diff <= 4.0 * eps * scale) return x;
            // Stalled at the round-off floor.
            if (diff >= prev && diff <= 1e-12 * scale) return x;
            prev = diff;
        }
        build_dense();
        return dense_->solve(b);
    }

private:
    CVec spectral_apply(const CVec& y) const {
        const SineTransform& s = st_.op().sine_transform();
        CVec c = sine_transform_complex(s, y);
        c.array() *= st_.op().sine_eigenvalues().array().cast<std::complex<double>>();
        return sine_transform_complex(s, c);
    }

    CVec precondition(const CVec& y) const {
        const SineTransform& s = st_.op().sine_transform();
        CVec c = sine_transform_complex(s, y);
        c.array() *= precond_.array();
        return sine_transform_complex(s, c);
    }

    void build_dense() const {
        const int n = static_cast<int>(W_.size());
        Eigen::MatrixXcd m = (-kI * tau_) * st_.op().matrix().cast<std::complex<double>>();
        for (int i = 0; i < n; ++i) m(i, i) += 1.0 - kI * tau_ * W_[i];
        dense_.emplace(m);
    }

    const LinearlyImplicitStepper& st_;
    double tau_;
    Vec W_;
    SymTridiag S_;
    std::optional<TridiagonalLU<std::complex<double>>> lu_;
    CVec precond_;
    double contraction_ = 0.0;
    mutable std::optional<Eigen::PartialPivLU<Eigen::MatrixXcd>> dense_;
};

LinearlyImplicitStepper::LinearlyImplicitStepper(const SchemeConfig& cfg,
                                                 std::shared_ptr<const SpatialOperator> op,
                                                 const PhysicsParams& params)
    : Stepper(std::move(op), cfg.dt),
      scheme_(cfg.scheme),
      coupling_(cfg.coupling),
      midpoint_(is_second_variant(cfg.scheme)),
      params_(params) {
    if (!is_linearly_implicit(scheme_)) throw UsageError("not a linearly implicit scheme");
    if (op_->kind() != operator_kind_for(scheme_)) {
        throw UsageError(std::string(to_string(scheme_)) + " needs a different spatial operator");
    }
    const int n = op_->size();
    e1_ = scheme_profile(*op_, params.eta1, params.eta1_fn);
    e2_ = scheme_profile(*op_, params.eta2, params.eta2_fn);
    if (e1_.size() != n || e2_.size() != n) throw UsageError("noise profile length mismatch");

    const double beta = 0.25 * dt_ * dt_;
    switch (op_->kind()) {
        case OperatorKind::CentralDiff: {
            tri_ = true;
            mass_ = {Vec::Ones(n), Vec::Zero(n - 1)};
            const Eigen::MatrixXd A = op_->matrix();
            stiff_ = {-A.diagonal(), -A.diagonal(1)};
            break;
        }
        case OperatorKind::Fem:
            tri_ = true;
            mass_ = op_->mass();
            stiff_ = op_->stiffness();
            break;
        case OperatorKind::SineSpectral: {
            const Vec& lam = op_->sine_eigenvalues();
            wave_lhs_ = (1.0 + beta * (1.0 - lam.array())).matrix();
            wave_rhs_ = (1.0 - beta * (1.0 - lam.array())).matrix();
            break;
        }
    }
    if (tri_) {
        // M + beta (K + M)
        wave_lu_ = factorize(mass_.plus(stiff_.plus(mass_), beta));
    }
}

SymTridiag LinearlyImplicitStepper::nweights(const Vec& w) const {
    if (op_->kind() == OperatorKind::Fem) return op_->weighted_mass(w);
    return {w, Vec::Zero(w.size() - 1)};
}

Vec LinearlyImplicitStepper::mass_mul(const Vec& x) const {
    return tri_ ? mass_.multiply(x) : x;
}

Vec LinearlyImplicitStepper::nmul(const Vec& w, const Vec& x) const {
    if (op_->kind() == OperatorKind::Fem) return op_->weighted_mass(w).multiply(x);
    return w.cwiseProduct(x);
}

Vec LinearlyImplicitStepper::stiff_plus_mass_mul(const Vec& x) const {
    if (tri_) return stiff_.multiply(x) + mass_.multiply(x);
    return x - op_->apply_via_transform(x);
}

FieldState LinearlyImplicitStepper::kick(const FieldState& s, const NoiseIncrement& inc) const {
    FieldState k = s;
    k.P += params_.C1 * inc.dB1 * e1_;
    k.Q -= params_.C1 * inc.dB0 * e1_;
    k.V += 0.5 * params_.C2 * inc.dB2 * e2_;
    return k;
}

Vec LinearlyImplicitStepper::wave_load(const FieldState& pre, const FieldState& kicked,
                                       const NoiseIncrement& inc) const {
    const double c = (midpoint_ ? 0.25 : 0.5) * dt_;
    if (coupling_ == NoiseCoupling::Splitting) {
        return c * (nmul(kicked.P, kicked.P) + nmul(kicked.Q, kicked.Q));
    }
    const double c1 = params_.C1;
    const double cross = (midpoint_ ? 0.5 : 1.0) * dt_ * c1;
    return c * (nmul(pre.P, pre.P) + nmul(pre.Q, pre.Q)) +
           cross * (inc.dB1 * nmul(e1_, pre.P) - inc.dB0 * nmul(e1_, pre.Q) +
                    c1 * dt_ * nmul(e1_, e1_));
}

Vec LinearlyImplicitStepper::wave_load_tangent(const FieldState& pre, const FieldState& kicked,
                                               const FieldState& d,
                                               const NoiseIncrement& inc) const {
    const double c = (midpoint_ ? 0.25 : 0.5) * dt_;
    if (coupling_ == NoiseCoupling::Splitting) {
        return 2.0 * c * (nmul(kicked.P, d.P) + nmul(kicked.Q, d.Q));
    }
    const double cross = (midpoint_ ? 0.5 : 1.0) * dt_ * params_.C1;
    return 2.0 * c * (nmul(pre.P, d.P) + nmul(pre.Q, d.Q)) +
           cross * (inc.dB1 * nmul(e1_, d.P) - inc.dB0 * nmul(e1_, d.Q));
}

Vec LinearlyImplicitStepper::solve_u(const Vec& Ubar, const Vec& Vbar, const Vec& G) const {
    const double beta = 0.25 * dt_ * dt_;
    if (tri_) {
        const Vec rhs = mass_mul(Ubar) - beta * stiff_plus_mass_mul(Ubar) +
                        2.0 * dt_ * mass_mul(Vbar) + dt_ * G;
        return wave_lu_.solve(rhs);
    }
    const SineTransform& s = op_->sine_transform();
    const Vec u = s.apply(Ubar);
    const Vec v = s.apply(Vbar);
    const Vec g = s.apply(G);
    const Vec modal = ((wave_rhs_.array() * u.array() + 2.0 * dt_ * v.array() + dt_ * g.array()) /
                       wave_lhs_.array())
                          .matrix();
    return s.apply(modal);
}

CVec LinearlyImplicitStepper::solve_phi(const CVec& phibar, const Vec& W) const {
    PhiSystem sys(*this, W);
    return sys.solve(sys.explicit_side(phibar));
}

void LinearlyImplicitStepper::advance(FieldState& state, const NoiseIncrement& inc,
                                      StepTrace* trace, std::span<FieldState> tangents) {
    state.check_shape(op_->size());
    try {
        const FieldState kicked = kick(state, inc);
        if (trace) trace->kicked = kicked;

        const Vec G = wave_load(state, kicked, inc);
        const Vec U1 = solve_u(kicked.U, kicked.V, G);
        const Vec V1 = (U1 - kicked.U) / dt_ - kicked.V;
        const Vec W = midpoint_ ? Vec(0.5 * (U1 + kicked.U)) : U1;

        const PhiSystem sys(*this, W);
        const CVec phibar = make_complex(kicked.P, kicked.Q);
        const CVec phi1 = sys.solve(sys.explicit_side(phibar));

        if (!tangents.empty()) {
            const CVec phisum = phi1 + phibar;
            const double tau = 0.5 * dt_;
            for (FieldState& d : tangents) {
                d.check_shape(op_->size());
                const Vec dG = wave_load_tangent(state, kicked, d, inc);
                const Vec dU1 = solve_u(d.U, d.V, dG);
                const Vec dV1 = (dU1 - d.U) / dt_ - d.V;
                const Vec dW = midpoint_ ? Vec(0.5 * (dU1 + d.U)) : dU1;
                const CVec rhs = sys.explicit_side(make_complex(d.P, d.Q)) +
                                 kI * tau * sys.weighted(dW, phisum);
                const CVec dphi1 = sys.solve(rhs);
                d.P = dphi1.real();
                d.Q = dphi1.imag();
                d.U = dU1;
                d.V = dV1;
                d.t += dt_;
            }
        }

        state.P = phi1.real();
        state.Q = phi1.imag();
        state.U = U1;
        state.V = V1;
        state.t += dt_;
    } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << to_string(scheme_) << " step at t = " << state.t << " (dt = " << dt_
            << ") failed: " << e.what();
        throw NumericalError(msg.str());
    }
    if (!state.finite()) {
        std::ostringstream msg;
        msg << to_string(scheme_) << " produced a non-finite state at t = " << state.t
            << " (dt = " << dt_ << ")";
        throw NumericalError(msg.str());
    }
}

void LinearlyImplicitStepper::step(FieldState& state, const NoiseIncrement& inc, StepTrace* trace) {
    advance(state, inc, trace, {});
}

void LinearlyImplicitStepper::step_with_tangents(FieldState& state, const NoiseIncrement& inc,
                                                 std::span<FieldState> tangents) {
    advance(state, inc, nullptr, tangents);
}

}  // namespace skgs
