#pragma once

#include <memory>
#include <span>

#include "skgs/grid.hpp"
#include "skgs/noise.hpp"
#include "skgs/spatial_ops.hpp"

namespace skgs {

/// Filled by the linearly implicit schemes: the state right after the
/// explicit noise kick, i.e. the input of the conservative substep.
struct StepTrace {
    FieldState kicked;
};

/// One-step map of a fully-discrete scheme. A stepper keeps per-path
/// workspace and must not be shared between threads; the operator it holds
/// is immutable and may be.
class Stepper {
public:
    virtual ~Stepper() = default;

    virtual Scheme scheme() const = 0;
    const SpatialOperator& op() const { return *op_; }
    double dt() const { return dt_; }

    /// Advances `state` by one step with the given increments; state.t += dt.
    virtual void step(FieldState& state, const NoiseIncrement& inc, StepTrace* trace = nullptr) = 0;

    /// Same step, and maps each tangent through the derivative of the step
    /// map taken at the incoming state.
    virtual void step_with_tangents(FieldState& state, const NoiseIncrement& inc,
                                    std::span<FieldState> tangents) = 0;

protected:
    Stepper(std::shared_ptr<const SpatialOperator> op, double dt) : op_(std::move(op)), dt_(dt) {}

    std::shared_ptr<const SpatialOperator> op_;
    double dt_;
};

/// Spatial discretization each scheme runs on.
OperatorKind operator_kind_for(Scheme s);
std::shared_ptr<const SpatialOperator> make_operator(Scheme s, const Grid1D& grid);

/// Noise profile in the representation a scheme works with: nodal samples
/// for the nodal schemes, L2-projected coefficients for finite elements.
Vec scheme_profile(const SpatialOperator& op, const Vec& nodal, const Profile& fn);

/// Initial state in the scheme's representation (finite elements use the
/// nodal interpolant as coefficient vector).
FieldState scheme_initial(const SpatialOperator& op, const FieldState& nodal);

std::unique_ptr<Stepper> make_stepper(const SchemeConfig& cfg,
                                      std::shared_ptr<const SpatialOperator> op,
                                      const PhysicsParams& params);

}  // namespace skgs
