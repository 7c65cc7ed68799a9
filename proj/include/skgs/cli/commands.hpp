#pragma once

#include <string>
#include <vector>

#include "skgs/cli/config.hpp"
#include "skgs/diagnostics.hpp"
#include "skgs/montecarlo.hpp"

namespace skgs::cli {

struct RunResult {
    std::vector<std::string> files;    // written outputs, in scheme order
    std::vector<std::string> summary;  // one line per file for the terminal
};

/// Resolves `cfg`, runs `cmd` and writes its CSV output(s) under `out`.
/// Law commands with several schemes write `<stem>_<SCHEME><ext>`.
RunResult run_command(Command cmd, const Tree& cfg, const std::string& out, int threads);

/// Re-runs the command recorded in the metadata block of `in` and writes the
/// result to `out`; the output is byte-identical to `in` when nothing else
/// has changed.
RunResult replay(const std::string& in, const std::string& out, int threads);

/// Output path for `scheme` when `count` schemes share one requested path.
std::string scheme_output_path(const std::string& out, const std::string& scheme, std::size_t count);

/// Ensemble record with its law reference and z-scores.
struct LawSeries {
    EvolutionRecord record;
    std::vector<double> mean;       // charge or energy mean
    std::vector<double> stderror;
    std::vector<double> reference;  // empty when no law is claimed
    double max_z = 0.0;             // max |mean - reference| / stderr
};

LawSeries run_law(Command cmd, const RunConfig& rc, const SchemeConfig& scheme, int threads);

/// True for the schemes the evolution laws are claimed for.
bool law_claimed(Scheme s);

/// Per-step wedge values of `pairs` tangent pairs for FD_SRK (symplectic
/// 2-form) or MSFD (multi-symplectic functional).
struct WedgeReport {
    std::vector<double> t;
    std::vector<std::vector<double>> values;  // [step][pair]
    std::vector<double> deviation;            // max over pairs of the relative change
    std::vector<double> closure;              // MSFD only
    double max_deviation = 0.0;
};

WedgeReport run_wedge(const RunConfig& rc, const SchemeConfig& scheme);

}  // namespace skgs::cli
