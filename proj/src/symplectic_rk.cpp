#include "skgs/symplectic_rk.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "skgs/error.hpp"

namespace skgs {

using Eigen::MatrixXd;

namespace {

double max_abs(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double state_scale(const FieldState& y) {
    double m = 1.0;
    for (const Vec* v : {&y.P, &y.Q, &y.U, &y.V}) m = std::max(m, v->cwiseAbs().maxCoeff());
    return m;
}

}  // namespace

SymplecticRkStepper::SymplecticRkStepper(const SchemeConfig& cfg,
                                         std::shared_ptr<const SpatialOperator> op,
                                         const PhysicsParams& params)
    : Stepper(std::move(op), cfg.dt),
      scheme_(cfg.scheme),
      tab_(make_parametric_tableau(cfg.stages, cfg.alpha)),
      kappa_(cfg.scheme == Scheme::MSFD ? 1.0 : cfg.srk_laplacian_weight),
      literal_mix_(cfg.scheme == Scheme::MSFD && cfg.msfd_literal_mix),
      fp_tol_(cfg.fp_tol),
      fp_max_iter_(cfg.fp_max_iter),
      params_(params) {
    if (scheme_ != Scheme::FD_SRK && scheme_ != Scheme::MSFD) {
        throw UsageError("symplectic Runge-Kutta stepper needs FD_SRK or MSFD");
    }
    if (!op_->sine_diagonal()) {
        throw UsageError("symplectic Runge-Kutta stepper needs a sine-diagonal operator");
    }
    const int n = op_->size();
    if (params_.eta1.size() != n || params_.eta2.size() != n) {
        throw UsageError("noise profile length mismatch");
    }
    const int s = tab_.s;
    const Vec& lam = op_->sine_eigenvalues();
    const MatrixXd I = MatrixXd::Identity(s, s);
    inv_qp_.resize(n);
    inv_vu_.resize(n);
    MatrixXd blk(2 * s, 2 * s);
    for (int k = 0; k < n; ++k) {
        const double theta = dt_ * kappa_ * lam[k];
        blk << I, -theta * tab_.a, theta * tab_.a, I;
        inv_qp_[k] = blk.partialPivLu().inverse();
        blk << I, -0.5 * dt_ * (lam[k] - 1.0) * tab_.a, -2.0 * dt_ * tab_.a, I;
        inv_vu_[k] = blk.partialPivLu().inverse();
    }
}

MatrixXd SymplecticRkStepper::to_modal(const MatrixXd& x) const {
    const SineTransform& tr = op_->sine_transform();
    MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        tr.apply(std::span<const double>(x.col(j).data(), x.rows()),
                 std::span<double>(out.col(j).data(), x.rows()));
    }
    return out;
}

MatrixXd SymplecticRkStepper::to_nodal(const MatrixXd& x) const { return to_modal(x); }

Vec SymplecticRkStepper::final_u(const Vec& u0, const MatrixXd& v) const {
    return u0 + 2.0 * dt_ * (v * tab_.b);
}

void SymplecticRkStepper::modal_solve(const MatrixXd& rq, const MatrixXd& rp,
                                      const MatrixXd& rv, const MatrixXd& ru,
                                      Stages& out) const {
    const int n = static_cast<int>(rq.rows());
    const int s = tab_.s;
    MatrixXd q(n, s), p(n, s), v(n, s), u(n, s);
    Eigen::VectorXd x(2 * s), y(2 * s);
    for (int k = 0; k < n; ++k) {
        x << rq.row(k).transpose(), rp.row(k).transpose();
        y.noalias() = inv_qp_[k] * x;
        q.row(k) = y.head(s).transpose();
        p.row(k) = y.tail(s).transpose();
        x << rv.row(k).transpose(), ru.row(k).transpose();
        y.noalias() = inv_vu_[k] * x;
        v.row(k) = y.head(s).transpose();
        u.row(k) = y.tail(s).transpose();
    }
    out.q = to_nodal(q);
    out.p = to_nodal(p);
    out.v = to_nodal(v);
    out.u = to_nodal(u);
}

SymplecticRkStepper::Stages SymplecticRkStepper::solve_stages(const FieldState& y0,
                                                              const NoiseIncrement& inc) {
    const int s = tab_.s;
    const MatrixXd at = tab_.a.transpose();
    const Eigen::RowVectorXd c = tab_.a.rowwise().sum().transpose();
    const SineTransform& tr = op_->sine_transform();

    auto base = [&](const Vec& y, const Vec& sigma) {
        const Vec yh = tr.apply(y);
        const Vec sh = tr.apply(sigma);
        return MatrixXd(yh.replicate(1, s) + sh * c);
    };
    const MatrixXd Rq = base(y0.Q, -params_.C1 * inc.dB0 * params_.eta1);
    const MatrixXd Rp = base(y0.P, params_.C1 * inc.dB1 * params_.eta1);
    const MatrixXd Rv = base(y0.V, 0.5 * params_.C2 * inc.dB2 * params_.eta2);
    const MatrixXd Ru = tr.apply(y0.U).replicate(1, s);

    Stages Y{y0.Q.replicate(1, s), y0.P.replicate(1, s), y0.V.replicate(1, s),
             y0.U.replicate(1, s)};
    const double tol = fp_tol_ * state_scale(y0);
    const Eigen::Index block = y0.Q.size() * s;
    auto pack = [&](const Stages& x) {
        Eigen::VectorXd out(4 * block);
        out << x.q.reshaped(), x.p.reshaped(), x.v.reshaped(), x.u.reshaped();
        return out;
    };
    auto unpack = [&](const Eigen::VectorXd& z, Stages& x) {
        const Eigen::Index n = y0.Q.size();
        x.q = z.segment(0, block).reshaped(n, s);
        x.p = z.segment(block, block).reshaped(n, s);
        x.v = z.segment(2 * block, block).reshaped(n, s);
        x.u = z.segment(3 * block, block).reshaped(n, s);
    };

    // Fixed-point map with Anderson mixing over the last kDepth iterates.
    // Plain iteration contracts slowly once dt * max|U| approaches one; the
    // mixing leaves the fixed point, and hence the scheme, unchanged.
    constexpr int kDepth = 5;
    std::vector<Eigen::VectorXd> dG, dF;
    Eigen::VectorXd x = pack(Y), g_prev, f_prev;
    double best = std::numeric_limits<double>::infinity();
    int growing = 0;
    Stages next;
    for (int it = 1; it <= fp_max_iter_; ++it) {
        const MatrixXd Nq = Y.u.cwiseProduct(Y.p);
        MatrixXd Np;
        if (literal_mix_) {
            Np = -(final_u(y0.U, Y.v).replicate(1, s)).cwiseProduct(Y.q);
        } else {
            Np = -Y.u.cwiseProduct(Y.q);
        }
        const MatrixXd Nv = 0.5 * (Y.p.cwiseAbs2() + Y.q.cwiseAbs2());
        modal_solve(Rq + dt_ * to_modal(Nq * at), Rp + dt_ * to_modal(Np * at),
                    Rv + dt_ * to_modal(Nv * at), Ru, next);
        const Eigen::VectorXd g = pack(next);
        const Eigen::VectorXd f = g - x;
        const double diff = f.cwiseAbs().maxCoeff();
        last_iterations_ = it;
        last_residual_ = diff;
        if (!std::isfinite(diff)) break;
        if (diff <= tol) return next;
        // Residuals may wander under mixing; only a sustained rise is fatal.
        growing = (diff > 10.0 * best) ? growing + 1 : 0;
        if (growing >= 5) break;
        best = std::min(best, diff);

        if (it > 1) {
            dG.push_back(g - g_prev);
            dF.push_back(f - f_prev);
            if (static_cast<int>(dF.size()) > kDepth) {
                dG.erase(dG.begin());
                dF.erase(dF.begin());
            }
        }
        g_prev = g;
        f_prev = f;
        if (dF.empty()) {
            x = g;
        } else {
            MatrixXd F(f.size(), dF.size()), G(f.size(), dG.size());
            for (std::size_t j = 0; j < dF.size(); ++j) {
                F.col(j) = dF[j];
                G.col(j) = dG[j];
            }
            const Eigen::VectorXd gamma = F.colPivHouseholderQr().solve(f);
            x = g - G * gamma;
        }
        unpack(x, Y);
    }
    std::ostringstream msg;
    msg << to_string(scheme_) << " stage iteration did not converge at t = " << y0.t
        << " (dt = " << dt_ << "): residual " << last_residual_ << " after " << last_iterations_
        << " iterations, tolerance " << tol;
    throw NumericalError(msg.str());
}

SymplecticRkStepper::Stages SymplecticRkStepper::solve_tangent_stages(const Stages& Y,
                                                                      const FieldState& d) const {
    const int s = tab_.s;
    const MatrixXd at = tab_.a.transpose();
    const SineTransform& tr = op_->sine_transform();
    const MatrixXd Rq = tr.apply(d.Q).replicate(1, s);
    const MatrixXd Rp = tr.apply(d.P).replicate(1, s);
    const MatrixXd Rv = tr.apply(d.V).replicate(1, s);
    const MatrixXd Ru = tr.apply(d.U).replicate(1, s);
    Stages dY{d.Q.replicate(1, s), d.P.replicate(1, s), d.V.replicate(1, s),
              d.U.replicate(1, s)};
    double scale = 1e-300;
    for (const Vec* v : {&d.P, &d.Q, &d.U, &d.V}) scale = std::max(scale, v->cwiseAbs().maxCoeff());
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double prev = std::numeric_limits<double>::infinity();
    Stages next;
    double diff = 0.0;
    for (int it = 0; it < 400; ++it) {
        const MatrixXd Nq = Y.u.cwiseProduct(dY.p) + Y.p.cwiseProduct(dY.u);
        MatrixXd Np;
        if (literal_mix_) {
            const Vec ufin = final_u(literal_u0_, Y.v);
            const Vec dufin = final_u(d.U, dY.v);
            Np = -(ufin.replicate(1, s).cwiseProduct(dY.q) + Y.q.cwiseProduct(dufin.replicate(1, s)));
        } else {
            Np = -(Y.u.cwiseProduct(dY.q) + Y.q.cwiseProduct(dY.u));
        }
        const MatrixXd Nv = Y.p.cwiseProduct(dY.p) + Y.q.cwiseProduct(dY.q);
        modal_solve(Rq + dt_ * to_modal(Nq * at), Rp + dt_ * to_modal(Np * at),
                    Rv + dt_ * to_modal(Nv * at), Ru, next);
        diff = std::max({max_abs(next.q - dY.q), max_abs(next.p - dY.p), max_abs(next.v - dY.v),
                         max_abs(next.u - dY.u)});
        std::swap(dY, next);
        if (!std::isfinite(diff)) break;
        if (diff <= 4.0 * eps * scale) return dY;
        if (diff >= prev && diff <= 1e-11 * scale) return dY;
        prev = diff;
    }
    std::ostringstream msg;
    msg << to_string(scheme_) << " tangent stage iteration did not converge (residual " << diff
        << ")";
    throw NumericalError(msg.str());
}

void SymplecticRkStepper::step(FieldState& state, const NoiseIncrement& inc, StepTrace*) {
    step_with_tangents(state, inc, {});
}

void SymplecticRkStepper::step_with_tangents(FieldState& state, const NoiseIncrement& inc,
                                             std::span<FieldState> tangents) {
    state.check_shape(op_->size());
    literal_u0_ = state.U;
    const Stages Y = solve_stages(state, inc);
    const Vec& b = tab_.b;
    const SpatialOperator& A = *op_;

    for (FieldState& d : tangents) {
        d.check_shape(op_->size());
        const Stages dY = solve_tangent_stages(Y, d);
        const Vec dNq = (Y.u.cwiseProduct(dY.p) + Y.p.cwiseProduct(dY.u)) * b;
        const Vec dNp = -(Y.u.cwiseProduct(dY.q) + Y.q.cwiseProduct(dY.u)) * b;
        const Vec dNv = (Y.p.cwiseProduct(dY.p) + Y.q.cwiseProduct(dY.q)) * b;
        const Vec ub = dY.u * b;
        d.Q += dt_ * (kappa_ * A.apply(dY.p * b) + dNq);
        d.P += dt_ * (-kappa_ * A.apply(dY.q * b) + dNp);
        d.V += dt_ * (0.5 * (A.apply(ub) - ub) + dNv);
        d.U += 2.0 * dt_ * (dY.v * b);
        d.t += dt_;
    }

    const Vec Nq = Y.u.cwiseProduct(Y.p) * b;
    const Vec Np = -Y.u.cwiseProduct(Y.q) * b;
    const Vec Nv = 0.5 * (Y.p.cwiseAbs2() + Y.q.cwiseAbs2()) * b;
    const Vec ub = Y.u * b;
    state.Q += dt_ * (kappa_ * A.apply(Y.p * b) + Nq) - params_.C1 * inc.dB0 * params_.eta1;
    state.P += dt_ * (-kappa_ * A.apply(Y.q * b) + Np) + params_.C1 * inc.dB1 * params_.eta1;
    state.V += dt_ * (0.5 * (A.apply(ub) - ub) + Nv) + 0.5 * params_.C2 * inc.dB2 * params_.eta2;
    state.U += 2.0 * dt_ * (Y.v * b);
    state.t += dt_;
    if (!state.finite()) {
        std::ostringstream msg;
        msg << to_string(scheme_) << " produced a non-finite state at t = " << state.t;
        throw NumericalError(msg.str());
    }
}

MultiSymState to_multisym(const FieldState& s, const Grid1D& grid) {
    MultiSymState z;
    z.P = s.P;
    z.Q = s.Q;
    z.U = s.U;
    z.R = 2.0 * s.V;
    z.F = forward_diff(grid, s.P, DiffSide::Backward);
    z.G = forward_diff(grid, s.Q, DiffSide::Backward);
    z.W = forward_diff(grid, s.U, DiffSide::Backward);
    z.t = s.t;
    return z;
}

FieldState from_multisym(const MultiSymState& z) {
    FieldState s;
    s.P = z.P;
    s.Q = z.Q;
    s.U = z.U;
    s.V = 0.5 * z.R;
    s.t = z.t;
    return s;
}

double closure_residual(const MultiSymState& z, const Grid1D& grid) {
    auto dev = [&](const Vec& v, const Vec& d) {
        return (forward_diff(grid, v, DiffSide::Backward) - d).cwiseAbs().maxCoeff();
    };
    return std::max({dev(z.P, z.F), dev(z.Q, z.G), dev(z.U, z.W)});
}

void step_multisym(Stepper& msfd, MultiSymState& z, const NoiseIncrement& inc) {
    if (msfd.scheme() != Scheme::MSFD) throw UsageError("step_multisym needs the MSFD stepper");
    FieldState s = from_multisym(z);
    msfd.step(s, inc);
    z = to_multisym(s, msfd.op().grid());
}

}  // namespace skgs
