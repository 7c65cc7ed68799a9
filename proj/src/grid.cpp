#include "skgs/grid.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <utility>

#include "skgs/error.hpp"

namespace skgs {

Grid1D make_grid(double a, double b, int M) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
        throw UsageError("grid: need finite endpoints with b > a");
    }
    if (M < 2) {
        throw UsageError("grid: need at least 2 cells (M >= 2), got " + std::to_string(M));
    }
    return Grid1D{a, b, M, (b - a) / M};
}

Vec Grid1D::interior_nodes() const {
    Vec x(interior());
    for (int i = 1; i < M; ++i) x[i - 1] = node(i);
    return x;
}

Vec Grid1D::sample(const Profile& f) const {
    Vec out(interior());
    for (int i = 1; i < M; ++i) out[i - 1] = f(node(i));
    return out;
}

FieldState FieldState::zeros(int n) {
    return FieldState{Vec::Zero(n), Vec::Zero(n), Vec::Zero(n), Vec::Zero(n), 0.0};
}

bool FieldState::finite() const {
    return P.allFinite() && Q.allFinite() && U.allFinite() && V.allFinite();
}

void FieldState::check_shape(int n) const {
    if (P.size() != n || Q.size() != n || U.size() != n || V.size() != n) {
        throw UsageError("state: field vectors must all have length M-1 = " + std::to_string(n));
    }
}

Profile default_noise_profile(const Grid1D& grid) {
    const double a = grid.a;
    const double len = grid.b - grid.a;
    return [a, len](double x) { return std::sin(std::numbers::pi * (x - a) / len); };
}

PhysicsParams make_params(const Grid1D& grid, double C1, double C2, Profile eta1, Profile eta2) {
    if (!eta1) eta1 = default_noise_profile(grid);
    if (!eta2) eta2 = default_noise_profile(grid);
    PhysicsParams p;
    p.C1 = C1;
    p.C2 = C2;
    p.eta1 = grid.sample(eta1);
    p.eta2 = grid.sample(eta2);
    if (!p.eta1.allFinite() || !p.eta2.allFinite()) {
        throw UsageError("noise profiles must be finite at every interior node");
    }
    p.eta1_fn = std::move(eta1);
    p.eta2_fn = std::move(eta2);
    return p;
}

namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 8> kSchemeNames{{
    {Scheme::CFD_I, "CFD_I"},
    {Scheme::CFD_II, "CFD_II"},
    {Scheme::SPS_I, "SPS_I"},
    {Scheme::SPS_II, "SPS_II"},
    {Scheme::FEM_I, "FEM_I"},
    {Scheme::FEM_II, "FEM_II"},
    {Scheme::FD_SRK, "FD_SRK"},
    {Scheme::MSFD, "MSFD"},
}};

std::string normalize(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = (c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

std::string_view to_string(Scheme s) {
    for (const auto& [k, name] : kSchemeNames) {
        if (k == s) return name;
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    const std::string key = normalize(name);
    for (const auto& [k, n] : kSchemeNames) {
        if (n == key) return k;
    }
    throw UsageError("unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(NoiseCoupling c) {
    return c == NoiseCoupling::Splitting ? "splitting" : "expectation";
}

NoiseCoupling parse_noise_coupling(std::string_view name) {
    const std::string key = normalize(name);
    if (key == "SPLITTING" || key == "SPLITTING_FORM") return NoiseCoupling::Splitting;
    if (key == "EXPECTATION") return NoiseCoupling::Expectation;
    throw UsageError("unknown noise coupling '" + std::string(name) + "' (splitting|expectation)");
}

bool is_linearly_implicit(Scheme s) {
    return s != Scheme::FD_SRK && s != Scheme::MSFD;
}

bool is_second_variant(Scheme s) {
    return s == Scheme::CFD_II || s == Scheme::SPS_II || s == Scheme::FEM_II;
}

int SchemeConfig::step_count() const {
    if (!(dt > 0.0) || !(T > 0.0) || dt > T * (1.0 + 1e-12)) {
        throw UsageError("scheme.dt: need 0 < dt <= T");
    }
    const double ratio = T / dt;
    const double n = std::round(ratio);
    if (std::abs(n * dt - T) > 1e-10 * T) {
        throw UsageError("scheme.T: T = " + std::to_string(T) + " is not a multiple of dt = " +
                         std::to_string(dt));
    }
    return static_cast<int>(n);
}

void SchemeConfig::validate() const {
    step_count();
    if (stages < 1) throw UsageError("scheme.stages: must be >= 1");
    if (!alpha.empty() && static_cast<int>(alpha.size()) != stages - 1) {
        throw UsageError("scheme.alpha: must have stages-1 = " + std::to_string(stages - 1) +
                         " entries");
    }
    if (!(fp_tol > 0.0)) throw UsageError("scheme.fp_tol: must be positive");
    if (fp_max_iter < 1) throw UsageError("scheme.fp_max_iter: must be positive");
}

InitialData InitialData::soliton(double theta) {
    InitialData d;
    d.kind = Kind::Soliton;
    d.theta = theta;
    return d;
}

InitialData InitialData::zero_with_unit_velocity() {
    return InitialData{};
}

InitialData InitialData::from_state(FieldState s) {
    InitialData d;
    d.kind = Kind::Custom;
    d.custom = std::move(s);
    return d;
}

FieldState eval_initial(const InitialData& data, const Grid1D& grid) {
    const int n = grid.interior();
    switch (data.kind) {
        case InitialData::Kind::ZeroWithUnitVelocity: {
            FieldState s = FieldState::zeros(n);
            s.V.setConstant(0.5);  // v = u_t / 2 with u_t(0) = 1
            return s;
        }
        case InitialData::Kind::Soliton: {
            const double th = data.theta;
            if (!(std::abs(th) < 1.0)) {
                throw UsageError("soliton initial data needs |theta| < 1");
            }
            const double w = 1.0 - th * th;
            const double width = 2.0 * std::sqrt(w);
            const double amp_phi = 3.0 * std::numbers::sqrt2 / (4.0 * std::sqrt(w));
            const double amp_u = 3.0 / (4.0 * w);
            const double amp_ut = 3.0 * th / (4.0 * w * std::sqrt(w));
            FieldState s = FieldState::zeros(n);
            for (int i = 1; i < grid.M; ++i) {
                const double x = grid.node(i);
                const double sech = 1.0 / std::cosh(x / width);
                const double sech2 = sech * sech;
                s.P[i - 1] = amp_phi * sech2 * std::cos(th * x);
                s.Q[i - 1] = amp_phi * sech2 * std::sin(th * x);
                s.U[i - 1] = amp_u * sech2;
                s.V[i - 1] = 0.5 * amp_ut * sech2 * std::tanh(x / width);
            }
            return s;
        }
        case InitialData::Kind::Custom: {
            data.custom.check_shape(n);
            if (!data.custom.finite()) throw UsageError("custom initial data must be finite");
            FieldState s = data.custom;
            s.t = 0.0;
            return s;
        }
    }
    throw UsageError("unknown initial data kind");
}

}  // namespace skgs
