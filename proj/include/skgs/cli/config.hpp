#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "skgs/grid.hpp"

namespace skgs::cli {

enum class Command { Simulate, ChargeLaw, EnergyLaw, Converge, Symplectic, Multisymplectic };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

using Tree = boost::property_tree::ptree;

/// Every recognised key with the defaults of `cmd`. Keys outside this tree
/// are rejected when merging a file or an override.
Tree default_config(Command cmd);

/// Merges an INI file into `cfg`. Unknown sections or keys are usage errors.
void merge_ini_file(Tree& cfg, const std::string& path);
void merge_ini_text(Tree& cfg, const std::string& text, const std::string& origin);
void merge_tree(Tree& cfg, const Tree& src, const std::string& origin);

/// Applies "section.key=value".
void apply_override(Tree& cfg, std::string_view assignment);

/// INI rendering of everything that determines the numbers in an output
/// file (thread count and output path excluded). Sections and keys keep
/// the default-tree order, so the text is stable.
std::string effective_ini(const Tree& cfg);

struct TangentSpec {
    int pairs = 8;
    int steps = 10;
    std::uint64_t seed = 0;
    bool zero = false;
};

/// Fully parsed and validated configuration.
struct RunConfig {
    Command command = Command::Simulate;
    Grid1D grid;
    std::vector<SchemeConfig> schemes;
    double C1 = 1.0;
    double C2 = 1.0;
    std::string eta1_expr, eta2_expr;
    InitialData initial;
    int samples = 1;
    std::uint64_t seed = 0;
    int record_stride = 1;
    std::vector<double> dt_list;
    double reference_dt = 0.0;
    int convergence_samples = 1;
    TangentSpec tangents;
    int snapshot_stride = 0;
    int threads = 1;  // from the [run] section; the CLI may override
    std::string out;
};

/// Validates every field before any computation; messages name the field
/// as section.key.
RunConfig resolve(const Tree& cfg, Command cmd);

PhysicsParams physics_params(const RunConfig& rc);

/// --threads, then SKGS_THREADS, then [run] threads, then the hardware;
/// zero means "not set" at every level.
int resolve_threads(int flag, int config_value);

}  // namespace skgs::cli
