#include "skgs/diagnostics.hpp"

#include "skgs/error.hpp"

namespace skgs {

namespace {

Vec square_load(const SpatialOperator& op, const Vec& P, const Vec& Q) {
    if (op.kind() == OperatorKind::Fem) {
        return op.weighted_mass(P).multiply(P) + op.weighted_mass(Q).multiply(Q);
    }
    return P.cwiseAbs2() + Q.cwiseAbs2();
}

}  // namespace

double charge(const FieldState& s, const SpatialOperator& op) {
    s.check_shape(op.size());
    return op.norm2(s.P) + op.norm2(s.Q);
}

double energy(const FieldState& s, const SpatialOperator& op) {
    s.check_shape(op.size());
    const Vec load = square_load(op, s.P, s.Q);
    const double cubic = op.kind() == OperatorKind::Fem ? s.U.dot(load) : op.grid().h * s.U.dot(load);
    return 2.0 * cubic - op.norm2(s.U) - 4.0 * op.norm2(s.V) + op.form(s.U, s.U) +
           2.0 * op.form(s.P, s.P) + 2.0 * op.form(s.Q, s.Q);
}

double coupling(const FieldState& s, const SpatialOperator& op, const Vec& eta1) {
    if (op.kind() == OperatorKind::Fem) return s.U.dot(op.weighted_mass(eta1).multiply(eta1));
    return op.grid().h * s.U.dot(eta1.cwiseAbs2());
}

LawConstants law_constants(const SpatialOperator& op, double C1, double C2, const Vec& eta1,
                           const Vec& eta2) {
    return LawConstants{C1, C2, op.norm2(eta1), op.norm2(eta2), op.form(eta1, eta1)};
}

double charge_law_reference(double N0, const LawConstants& k, double t) {
    return N0 + 2.0 * k.C1 * k.C1 * k.eta1_norm2 * t;
}

double energy_law_reference(double H0, const LawConstants& k, double t, double coupling_integral) {
    const double c1sq = k.C1 * k.C1;
    return H0 - k.C2 * k.C2 * k.Q2 * t + 4.0 * c1sq * k.Q1 * t + 4.0 * c1sq * coupling_integral;
}

double symplectic_form(const FieldState& d1, const FieldState& d2, const Grid1D& grid) {
    const int n = grid.interior();
    d1.check_shape(n);
    d2.check_shape(n);
    return grid.h * (d1.Q.dot(d2.P) - d2.Q.dot(d1.P) + d1.V.dot(d2.U) - d2.V.dot(d1.U));
}

double multisymplectic_functional(const FieldState& d1, const FieldState& d2) {
    d2.check_shape(d1.size());
    const Vec R1 = 2.0 * d1.V;
    const Vec R2 = 2.0 * d2.V;
    return 2.0 * (d1.Q.dot(d2.P) - d2.Q.dot(d1.P)) + R1.dot(d2.U) - R2.dot(d1.U);
}

void EvolutionRecord::check() const {
    const std::size_t n = t.size();
    for (const SeriesStats* s : {&charge, &energy, &coupling, &coupling_integral}) {
        if (s->mean.size() != n || s->stderror.size() != n) {
            throw UsageError("evolution record: inconsistent series lengths");
        }
    }
    if (step.size() != n) throw UsageError("evolution record: inconsistent step column");
}

}  // namespace skgs
