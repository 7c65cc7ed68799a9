#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace skgs {

using Vec = Eigen::VectorXd;
using Profile = std::function<double(double)>;

/// Uniform partition of [a, b] into M cells. Only the M-1 interior nodes
/// carry unknowns; homogeneous Dirichlet values at a and b are implicit.
struct Grid1D {
    double a = 0.0;
    double b = 1.0;
    int M = 2;
    double h = 0.5;

    int interior() const { return M - 1; }
    double node(int i) const { return a + i * h; }  // i = 0..M
    Vec interior_nodes() const;
    Vec sample(const Profile& f) const;
};

Grid1D make_grid(double a, double b, int M);

/// Interior nodal values of p = Re(phi), q = Im(phi), u and v = u_t / 2.
struct FieldState {
    Vec P, Q, U, V;
    double t = 0.0;

    static FieldState zeros(int n);
    int size() const { return static_cast<int>(P.size()); }
    bool finite() const;
    void check_shape(int n) const;
};

/// Additive-noise amplitudes and spatial noise profiles.
/// `eta1_fn`/`eta2_fn` keep the underlying functions so the finite element
/// discretization can L2-project them instead of interpolating.
struct PhysicsParams {
    double C1 = 0.0;
    double C2 = 0.0;
    Vec eta1;
    Vec eta2;
    Profile eta1_fn;
    Profile eta2_fn;
};

/// sin(pi (x - a) / (b - a)); vanishes at both ends of the domain.
Profile default_noise_profile(const Grid1D& grid);

PhysicsParams make_params(const Grid1D& grid, double C1, double C2, Profile eta1 = {},
                          Profile eta2 = {});

enum class Scheme { CFD_I, CFD_II, SPS_I, SPS_II, FEM_I, FEM_II, FD_SRK, MSFD };

/// How the Wiener increments enter the wave equation of the linearly implicit
/// schemes. `Splitting` is the explicit-kick / conservative-step form, `Expectation`
/// replaces the squared increments by their expectation dt.
enum class NoiseCoupling { Splitting, Expectation };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);
std::string_view to_string(NoiseCoupling c);
NoiseCoupling parse_noise_coupling(std::string_view name);
bool is_linearly_implicit(Scheme s);
bool is_second_variant(Scheme s);

struct SchemeConfig {
    Scheme scheme = Scheme::CFD_I;
    double dt = 1e-3;
    double T = 1.0;
    std::vector<double> alpha;  // one per stage beyond the first
    int stages = 2;
    NoiseCoupling coupling = NoiseCoupling::Splitting;
    double fp_tol = 1e-12;
    int fp_max_iter = 200;
    // Symplectic RK: weight of the Laplacian in the Schroedinger stage equations.
    double srk_laplacian_weight = 0.5;
    // MSFD: use the end-of-step U in the P stage equation instead of the stage U.
    bool msfd_literal_mix = false;

    /// Number of uniform steps; throws UsageError if T is not a multiple of dt.
    int step_count() const;
    void validate() const;
};

struct InitialData {
    enum class Kind { Soliton, ZeroWithUnitVelocity, Custom };

    Kind kind = Kind::ZeroWithUnitVelocity;
    double theta = 0.0;
    FieldState custom;

    static InitialData soliton(double theta);
    static InitialData zero_with_unit_velocity();
    static InitialData from_state(FieldState s);
};

FieldState eval_initial(const InitialData& data, const Grid1D& grid);

}  // namespace skgs
