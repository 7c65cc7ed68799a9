#pragma once

#include <cstdint>
#include <vector>

#include "skgs/diagnostics.hpp"
#include "skgs/grid.hpp"

namespace skgs {

struct EnsembleSpec {
    Grid1D grid;
    SchemeConfig scheme;
    PhysicsParams params;
    InitialData initial;
    int samples = 1;
    std::uint64_t master_seed = 0;
    int record_stride = 1;
    int threads = 1;
};

/// Runs `samples` independent paths and aggregates charge, energy, coupling
/// and the running coupling integral at steps 0, stride, 2 stride, ... and
/// the final step. Per-sample seeds come from derive_seed(master, index) and
/// the reduction is a sequential fold in sample order, so the result is
/// bitwise independent of the thread count.
EvolutionRecord run_ensemble(const EnsembleSpec& spec);

/// Mean-square error study. Every sample draws one Brownian path at
/// reference_dt; the reference solution and each coarse run are driven by
/// aggregates of it.
struct ConvergenceSpec {
    Grid1D grid;
    SchemeConfig scheme;  // dt is ignored; T, stages, alpha, ... are used
    PhysicsParams params;
    InitialData initial;
    std::vector<double> dt_list;  // strictly descending
    double reference_dt = 0.0;
    int samples = 1;
    std::uint64_t master_seed = 0;
    int threads = 1;
};

struct ConvergenceResult {
    std::vector<double> dt;
    std::vector<double> rms_error;
    double slope = 0.0;  // NaN when fewer than two positive errors
};

ConvergenceResult run_convergence(const ConvergenceSpec& spec);

/// Least-squares slope of log(err) against log(dt) over entries with err > 0.
double fit_loglog_slope(const std::vector<double>& dt, const std::vector<double>& err);

/// Thread count from SKGS_THREADS if set, else the hardware concurrency.
int default_thread_count();

}  // namespace skgs
