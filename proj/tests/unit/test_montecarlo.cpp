#include <doctest.h>

#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "skgs/error.hpp"
#include "skgs/integrators.hpp"
#include "skgs/montecarlo.hpp"

using namespace skgs;

namespace {

EnsembleSpec small_spec(Scheme s, int samples) {
    EnsembleSpec e;
    e.grid = make_grid(0.0, 1.0, 16);
    e.scheme.scheme = s;
    e.scheme.dt = 25.0 / 256;
    e.scheme.T = 51 * 25.0 / 256;
    e.scheme.alpha = {0.001};
    e.params = make_params(e.grid, 1.0, 1.0);
    e.initial = InitialData::zero_with_unit_velocity();
    e.samples = samples;
    e.master_seed = 99;
    e.record_stride = 7;
    e.threads = 1;
    return e;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(const EvolutionRecord& a, const EvolutionRecord& b) {
    return a.step == b.step && same_bits(a.t, b.t) && same_bits(a.charge.mean, b.charge.mean) &&
           same_bits(a.charge.stderror, b.charge.stderror) &&
           same_bits(a.energy.mean, b.energy.mean) &&
           same_bits(a.energy.stderror, b.energy.stderror) &&
           same_bits(a.coupling.mean, b.coupling.mean) &&
           same_bits(a.coupling_integral.mean, b.coupling_integral.mean);
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("recorded steps include the final step") {
    const EvolutionRecord r = run_ensemble(small_spec(Scheme::CFD_I, 2));
    // 51 steps, stride 7
    REQUIRE(r.step.size() == 9);
    CHECK(r.step.front() == 0);
    CHECK(r.step[1] == 7);
    CHECK(r.step.back() == 51);
    CHECK(r.t.back() == doctest::Approx(51 * 25.0 / 256));
    CHECK_NOTHROW(r.check());
}

TEST_CASE("one sample reproduces the single path") {
    EnsembleSpec e = small_spec(Scheme::FEM_II, 1);
    e.record_stride = 1;
    const EvolutionRecord r = run_ensemble(e);
    const auto op = make_operator(e.scheme.scheme, e.grid);
    auto st = make_stepper(e.scheme, op, e.params);
    FieldState x = scheme_initial(*op, eval_initial(e.initial, e.grid));
    const std::uint64_t seed = derive_seed(e.master_seed, 0);
    for (int n = 0; n <= e.scheme.step_count(); ++n) {
        CHECK(r.charge.mean[n] == charge(x, *op));
        CHECK(r.energy.mean[n] == energy(x, *op));
        CHECK(r.charge.stderror[n] == 0.0);
        if (n < e.scheme.step_count()) st->step(x, increment_at(seed, n, e.scheme.dt));
    }
}

TEST_CASE("deterministic paths give zero standard errors") {
    EnsembleSpec e = small_spec(Scheme::SPS_I, 5);
    e.params = make_params(e.grid, 0.0, 0.0);
    const EvolutionRecord r = run_ensemble(e);
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r.charge.stderror[i] == 0.0);
        CHECK(r.energy.stderror[i] == 0.0);
    }
}

TEST_CASE("aggregation is independent of the thread count") {
    EnsembleSpec e = small_spec(Scheme::CFD_II, 70);  // spans two blocks
    const EvolutionRecord one = run_ensemble(e);
    e.threads = 3;
    const EvolutionRecord three = run_ensemble(e);
    e.threads = 8;
    const EvolutionRecord eight = run_ensemble(e);
    CHECK(same_bits(one, three));
    CHECK(same_bits(one, eight));
    e.master_seed = 100;
    CHECK_FALSE(same_bits(one, run_ensemble(e)));
}

TEST_CASE("standard error scales like one over the square root of the sample count") {
    EnsembleSpec e = small_spec(Scheme::CFD_I, 500);
    e.scheme.T = 50.0;
    e.record_stride = 64;
    e.threads = 2;
    const EvolutionRecord a = run_ensemble(e);
    e.samples = 2000;
    const EvolutionRecord b = run_ensemble(e);
    for (std::size_t i = 1; i < a.size(); ++i) {
        const double ratio = a.charge.stderror[i] / b.charge.stderror[i];
        CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
    }
}

TEST_CASE("a failing path aborts with its sample index") {
    EnsembleSpec e = small_spec(Scheme::FD_SRK, 3);
    e.scheme.fp_max_iter = 1;
    try {
        run_ensemble(e);
        FAIL("expected a numerical failure");
    } catch (const NumericalError& err) {
        CHECK(std::string(err.what()).find("sample 0") != std::string::npos);
    }
}

TEST_CASE("invalid ensembles") {
    EnsembleSpec e = small_spec(Scheme::CFD_I, 0);
    CHECK_THROWS_AS(run_ensemble(e), UsageError);
    e.samples = 1;
    e.record_stride = 0;
    CHECK_THROWS_AS(run_ensemble(e), UsageError);
}

TEST_CASE("log-log slope") {
    const std::vector<double> dt{0.125, 0.0625, 0.03125};
    std::vector<double> err;
    for (double d : dt) err.push_back(3.0 * std::pow(d, 1.5));
    CHECK(fit_loglog_slope(dt, err) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(std::isnan(fit_loglog_slope({0.1}, {0.2})));
    CHECK(fit_loglog_slope({0.1, 0.05, 0.025}, {0.0, 0.4, 0.2}) == doctest::Approx(1.0));
}

TEST_CASE("convergence: shared Brownian path") {
    ConvergenceSpec c;
    c.grid = make_grid(-15.0, 15.0, 64);
    c.scheme.scheme = Scheme::CFD_I;
    c.scheme.T = 0.5;
    c.params = make_params(c.grid, 1.0, 1.0);
    c.initial = InitialData::soliton(0.3);
    c.reference_dt = 1.0 / 64;
    c.samples = 4;
    c.master_seed = 1;

    c.dt_list = {1.0 / 64};
    const ConvergenceResult same = run_convergence(c);
    REQUIRE(same.rms_error.size() == 1);
    CHECK(same.rms_error[0] == 0.0);

    c.dt_list = {1.0 / 8, 1.0 / 16, 1.0 / 32};
    const ConvergenceResult r = run_convergence(c);
    CHECK(r.rms_error[0] > r.rms_error[1]);
    CHECK(r.rms_error[1] > r.rms_error[2]);
    c.threads = 3;
    const ConvergenceResult r3 = run_convergence(c);
    CHECK(same_bits(r.rms_error, r3.rms_error));

    c.dt_list = {1.0 / 16, 1.0 / 8};
    CHECK_THROWS_AS(run_convergence(c), UsageError);
    c.dt_list = {0.1};
    CHECK_THROWS_AS(run_convergence(c), UsageError);
    c.dt_list = {1.0 / 8};
    c.reference_dt = 3.0 / 64;
    CHECK_THROWS_AS(run_convergence(c), UsageError);
}

}
