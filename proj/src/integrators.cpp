#include "skgs/integrators.hpp"

#include "skgs/error.hpp"
#include "skgs/linearly_implicit.hpp"
#include "skgs/symplectic_rk.hpp"

namespace skgs {

OperatorKind operator_kind_for(Scheme s) {
    switch (s) {
        case Scheme::SPS_I:
        case Scheme::SPS_II: return OperatorKind::SineSpectral;
        case Scheme::FEM_I:
        case Scheme::FEM_II: return OperatorKind::Fem;
        default: return OperatorKind::CentralDiff;
    }
}

std::shared_ptr<const SpatialOperator> make_operator(Scheme s, const Grid1D& grid) {
    switch (operator_kind_for(s)) {
        case OperatorKind::SineSpectral:
            return std::make_shared<const SpatialOperator>(SpatialOperator::sine_spectral(grid));
        case OperatorKind::Fem:
            return std::make_shared<const SpatialOperator>(SpatialOperator::fem(grid));
        case OperatorKind::CentralDiff: break;
    }
    return std::make_shared<const SpatialOperator>(SpatialOperator::central_diff(grid));
}

Vec scheme_profile(const SpatialOperator& op, const Vec& nodal, const Profile& fn) {
    if (op.kind() == OperatorKind::Fem && fn) return op.project_l2(fn);
    return nodal;
}

FieldState scheme_initial(const SpatialOperator& op, const FieldState& nodal) {
    nodal.check_shape(op.size());
    return nodal;
}

std::unique_ptr<Stepper> make_stepper(const SchemeConfig& cfg,
                                      std::shared_ptr<const SpatialOperator> op,
                                      const PhysicsParams& params) {
    cfg.validate();
    if (!op) throw UsageError("make_stepper: no spatial operator");
    if (op->kind() != operator_kind_for(cfg.scheme)) {
        throw UsageError(std::string(to_string(cfg.scheme)) +
                         " is defined on a different spatial discretization");
    }
    if (is_linearly_implicit(cfg.scheme)) {
        return std::make_unique<LinearlyImplicitStepper>(cfg, std::move(op), params);
    }
    return std::make_unique<SymplecticRkStepper>(cfg, std::move(op), params);
}

}  // namespace skgs
