#pragma once

#include <vector>

#include "skgs/grid.hpp"
#include "skgs/spatial_ops.hpp"

namespace skgs {

/// Discrete charge ||P||^2 + ||Q||^2 in the operator's inner product
/// (lattice sum for nodal schemes, mass matrix for finite elements).
double charge(const FieldState& s, const SpatialOperator& op);

/// Discrete energy
///   2<U, P.P + Q.Q> - ||U||^2 - 4||V||^2 + <U, AU> + 2<P, AP> + 2<Q, AQ>
/// with the scheme-matched operator; for finite elements the cubic term is
/// 2 U^T (N(P) P + N(Q) Q) and <x, Ay> = -x^T K y.
double energy(const FieldState& s, const SpatialOperator& op);

/// <U, eta1 . eta1>, or U^T N(e1) e1 for finite elements.
double coupling(const FieldState& s, const SpatialOperator& op, const Vec& eta1);

/// Scheme-matched constants of the evolution laws.
struct LawConstants {
    double C1 = 0.0;
    double C2 = 0.0;
    double eta1_norm2 = 0.0;  // ||eta1||^2
    double Q2 = 0.0;          // ||eta2||^2
    double Q1 = 0.0;          // <eta1, A eta1>
};

LawConstants law_constants(const SpatialOperator& op, double C1, double C2, const Vec& eta1,
                           const Vec& eta2);

/// N0 + 2 C1^2 ||eta1||^2 t.
double charge_law_reference(double N0, const LawConstants& k, double t);

/// H0 - C2^2 Q2 t + 4 C1^2 Q1 t + 4 C1^2 I, where I is the (ensemble-mean)
/// running sum of the coupling term times dt over steps 0..n-1.
double energy_law_reference(double H0, const LawConstants& k, double t, double coupling_integral);

/// h * sum(dq1 dp2 - dq2 dp1 + dv1 du2 - dv2 du1).
double symplectic_form(const FieldState& d1, const FieldState& d2, const Grid1D& grid);

/// sum_i (2 dQ^dP + dR^dU) for tangents stored with R = 2V.
double multisymplectic_functional(const FieldState& d1, const FieldState& d2);

/// Per-path and ensemble time series of the law diagnostics.
struct SeriesStats {
    std::vector<double> mean;
    std::vector<double> stderror;
};

struct EvolutionRecord {
    int samples = 0;
    std::vector<long> step;
    std::vector<double> t;
    SeriesStats charge;
    SeriesStats energy;
    SeriesStats coupling;
    SeriesStats coupling_integral;

    std::size_t size() const { return t.size(); }
    void check() const;
};

}  // namespace skgs
