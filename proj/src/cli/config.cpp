#include "skgs/cli/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "skgs/error.hpp"
#include "skgs/montecarlo.hpp"
#include "skgs/profile_expr.hpp"

namespace skgs::cli {

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 6> kCommands{{
    {Command::Simulate, "simulate"},
    {Command::ChargeLaw, "charge-law"},
    {Command::EnergyLaw, "energy-law"},
    {Command::Converge, "converge"},
    {Command::Symplectic, "symplectic"},
    {Command::Multisymplectic, "multisymplectic"},
}};

// Sections that never reach the metadata block.
bool excluded_from_metadata(const std::string& section, const std::string& key) {
    return section == "run" || (section == "output" && key == "path");
}

std::string trimmed(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trimmed(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

class Reader {
public:
    explicit Reader(const Tree& t) : t_(t) {}

    std::string str(const std::string& path) const { return t_.get<std::string>(path); }

    double real(const std::string& path) const {
        try {
            return parse_constant(str(path));
        } catch (const UsageError& e) {
            throw UsageError(path + ": " + e.what());
        }
    }

    long long integer(const std::string& path, long long lo) const {
        const double v = real(path);
        if (v != std::floor(v) || std::abs(v) > 9e15) {
            throw UsageError(path + ": expected an integer, got '" + str(path) + "'");
        }
        if (v < lo) {
            throw UsageError(path + ": must be >= " + std::to_string(lo));
        }
        return static_cast<long long>(v);
    }

    std::uint64_t seed(const std::string& path) const {
        const std::string s = trimmed(str(path));
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(s, &used, 0);
            if (used != s.size() || s.front() == '-') throw std::invalid_argument("seed");
            return v;
        } catch (const std::exception&) {
            throw UsageError(path + ": expected a non-negative integer seed, got '" + s + "'");
        }
    }

    bool boolean(const std::string& path) const {
        const std::string s = trimmed(str(path));
        if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
        if (s == "false" || s == "0" || s == "no" || s == "off") return false;
        throw UsageError(path + ": expected true or false, got '" + s + "'");
    }

    std::vector<double> reals(const std::string& path) const {
        std::vector<double> out;
        for (const std::string& item : split_list(str(path))) {
            try {
                out.push_back(parse_constant(item));
            } catch (const UsageError& e) {
                throw UsageError(path + ": " + e.what());
            }
        }
        return out;
    }

private:
    const Tree& t_;
};

void put(Tree& t, const std::string& path, const std::string& value) { t.put(path, value); }

}  // namespace

void merge_tree(Tree& cfg, const Tree& src, const std::string& origin) {
    for (const auto& [section, body] : src) {
        if (body.empty() && !body.data().empty()) {
            throw UsageError(origin + ": key '" + section + "' must be inside a [section]");
        }
        const auto sec = cfg.find(section);
        if (sec == cfg.not_found()) {
            throw UsageError(origin + ": unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (sec->second.find(key) == sec->second.not_found()) {
                throw UsageError(origin + ": unknown key " + section + "." + key);
            }
            cfg.put(section + "." + key, value.data());
        }
    }
}

std::string_view to_string(Command c) {
    for (const auto& [k, name] : kCommands) {
        if (k == c) return name;
    }
    return "?";
}

Command parse_command(std::string_view name) {
    for (const auto& [k, n] : kCommands) {
        if (n == name) return k;
    }
    throw UsageError("unknown command '" + std::string(name) + "'");
}

Tree default_config(Command cmd) {
    Tree t;
    const bool law = cmd == Command::ChargeLaw || cmd == Command::EnergyLaw;
    const bool tangent = cmd == Command::Symplectic || cmd == Command::Multisymplectic;

    put(t, "grid.a", law ? "0" : "-15");
    put(t, "grid.b", law ? "1" : "15");
    std::string M = "256";
    if (cmd == Command::ChargeLaw) M = "16";
    if (cmd == Command::EnergyLaw) M = "8";
    if (tangent) M = "128";
    put(t, "grid.M", M);

    std::string scheme = "CFD_I";
    if (cmd == Command::Symplectic) scheme = "FD_SRK";
    if (cmd == Command::Multisymplectic) scheme = "MSFD";
    put(t, "scheme.name", scheme);
    std::string dt = "2^-8";
    if (cmd == Command::ChargeLaw) dt = "25/2^8";
    if (cmd == Command::EnergyLaw) dt = "25/2^10";
    if (tangent) dt = "2^-6";
    put(t, "scheme.dt", dt);
    put(t, "scheme.T", law ? "50" : "1");
    put(t, "scheme.stages", "2");
    put(t, "scheme.alpha", "0.001");
    put(t, "scheme.noise_coupling", "splitting");
    put(t, "scheme.fp_tol", "1e-12");
    put(t, "scheme.fp_max_iter", "200");
    put(t, "scheme.srk_laplacian_weight", "0.5");
    put(t, "scheme.msfd_literal_mix", "false");

    put(t, "noise.C1", "1");
    put(t, "noise.C2", "1");
    put(t, "noise.eta1", "default");
    put(t, "noise.eta2", "default");

    put(t, "initial.kind", law ? "zero_unit_velocity" : "soliton");
    put(t, "initial.theta", "0.3");

    put(t, "ensemble.samples", cmd == Command::Simulate ? "1" : "500");
    put(t, "ensemble.seed", "20240601");
    put(t, "ensemble.record_stride", "1");

    put(t, "convergence.dt_list", "2^-3, 2^-4, 2^-5, 2^-6");
    put(t, "convergence.reference_dt", "2^-8");
    put(t, "convergence.samples", "200");

    put(t, "tangents.pairs", "8");
    put(t, "tangents.steps", "10");
    put(t, "tangents.seed", "7");
    put(t, "tangents.kind", "random");

    put(t, "output.path", "");
    put(t, "output.snapshot_stride", "0");

    put(t, "run.threads", "0");
    return t;
}

void merge_ini_text(Tree& cfg, const std::string& text, const std::string& origin) {
    Tree src;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, src);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    merge_tree(cfg, src, origin);
}

void merge_ini_file(Tree& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    merge_ini_text(cfg, buf.str(), path);
}

void apply_override(Tree& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
        throw UsageError("--set expects section.key=value, got '" + std::string(assignment) + "'");
    }
    const std::string section = trimmed(std::string(assignment.substr(0, dot)));
    const std::string key = trimmed(std::string(assignment.substr(dot + 1, eq - dot - 1)));
    const std::string value = trimmed(std::string(assignment.substr(eq + 1)));
    const auto sec = cfg.find(section);
    if (sec == cfg.not_found() || sec->second.find(key) == sec->second.not_found()) {
        throw UsageError("--set: unknown key " + section + "." + key);
    }
    cfg.put(section + "." + key, value);
}

std::string effective_ini(const Tree& cfg) {
    std::ostringstream out;
    for (const auto& [section, body] : cfg) {
        bool header = false;
        for (const auto& [key, value] : body) {
            if (excluded_from_metadata(section, key)) continue;
            if (!header) {
                out << '[' << section << "]\n";
                header = true;
            }
            out << key << " = " << value.data() << '\n';
        }
    }
    return out.str();
}

RunConfig resolve(const Tree& cfg, Command cmd) {
    const Reader r(cfg);
    RunConfig rc;
    rc.command = cmd;

    const double a = r.real("grid.a");
    const double b = r.real("grid.b");
    const long long M = r.integer("grid.M", 2);
    if (!(b > a)) throw UsageError("grid.b: must exceed grid.a");
    rc.grid = make_grid(a, b, static_cast<int>(M));

    const std::vector<std::string> names = split_list(r.str("scheme.name"));
    if (names.empty()) throw UsageError("scheme.name: no scheme given");
    SchemeConfig base;
    base.dt = r.real("scheme.dt");
    base.T = r.real("scheme.T");
    base.stages = static_cast<int>(r.integer("scheme.stages", 1));
    base.alpha = r.reals("scheme.alpha");
    base.coupling = parse_noise_coupling(r.str("scheme.noise_coupling"));
    base.fp_tol = r.real("scheme.fp_tol");
    base.fp_max_iter = static_cast<int>(r.integer("scheme.fp_max_iter", 1));
    base.srk_laplacian_weight = r.real("scheme.srk_laplacian_weight");
    base.msfd_literal_mix = r.boolean("scheme.msfd_literal_mix");
    // One value is repeated for every free parameter; stages = 1 has none.
    if (base.stages == 1) {
        base.alpha.clear();
    } else if (base.alpha.size() == 1) {
        base.alpha.assign(base.stages - 1, base.alpha.front());
    } else if (static_cast<int>(base.alpha.size()) != base.stages - 1) {
        throw UsageError("scheme.alpha: expected 1 or " + std::to_string(base.stages - 1) +
                         " values for " + std::to_string(base.stages) + " stages");
    }
    for (const std::string& n : names) {
        SchemeConfig c = base;
        try {
            c.scheme = parse_scheme(n);
        } catch (const UsageError& e) {
            throw UsageError(std::string("scheme.name: ") + e.what());
        }
        c.validate();
        rc.schemes.push_back(c);
    }

    rc.C1 = r.real("noise.C1");
    rc.C2 = r.real("noise.C2");
    rc.eta1_expr = r.str("noise.eta1");
    rc.eta2_expr = r.str("noise.eta2");
    try {
        (void)physics_params(rc);
    } catch (const UsageError& e) {
        throw UsageError(std::string("noise.eta1/eta2: ") + e.what());
    }

    const std::string kind = trimmed(r.str("initial.kind"));
    if (kind == "soliton") {
        const double theta = r.real("initial.theta");
        if (!(std::abs(theta) < 1.0)) throw UsageError("initial.theta: need |theta| < 1");
        rc.initial = InitialData::soliton(theta);
    } else if (kind == "zero_unit_velocity") {
        rc.initial = InitialData::zero_with_unit_velocity();
    } else {
        throw UsageError("initial.kind: expected soliton or zero_unit_velocity, got '" + kind + "'");
    }

    rc.samples = static_cast<int>(r.integer("ensemble.samples", 1));
    rc.seed = r.seed("ensemble.seed");
    rc.record_stride = static_cast<int>(r.integer("ensemble.record_stride", 1));

    rc.dt_list = r.reals("convergence.dt_list");
    rc.reference_dt = r.real("convergence.reference_dt");
    rc.convergence_samples = static_cast<int>(r.integer("convergence.samples", 1));
    if (cmd == Command::Converge) {
        if (rc.dt_list.empty()) throw UsageError("convergence.dt_list: empty");
        for (std::size_t i = 1; i < rc.dt_list.size(); ++i) {
            if (!(rc.dt_list[i] < rc.dt_list[i - 1])) {
                throw UsageError("convergence.dt_list: must be strictly descending");
            }
        }
        for (double dt : rc.dt_list) {
            const double k = dt / rc.reference_dt;
            if (!(rc.reference_dt > 0.0) || std::abs(k - std::round(k)) > 1e-9 * k || k < 0.5) {
                throw UsageError("convergence.reference_dt: must divide every entry of dt_list");
            }
        }
    }

    rc.tangents.pairs = static_cast<int>(r.integer("tangents.pairs", 0));
    rc.tangents.steps = static_cast<int>(r.integer("tangents.steps", 1));
    rc.tangents.seed = r.seed("tangents.seed");
    const std::string tkind = trimmed(r.str("tangents.kind"));
    if (tkind != "random" && tkind != "zero") {
        throw UsageError("tangents.kind: expected random or zero, got '" + tkind + "'");
    }
    rc.tangents.zero = tkind == "zero";

    rc.snapshot_stride = static_cast<int>(r.integer("output.snapshot_stride", 0));
    rc.out = trimmed(r.str("output.path"));
    rc.threads = static_cast<int>(r.integer("run.threads", 0));

    if (cmd == Command::Simulate && rc.schemes.size() != 1) {
        throw UsageError("scheme.name: simulate runs exactly one scheme");
    }
    if (cmd == Command::Symplectic) {
        for (const auto& s : rc.schemes) {
            if (s.scheme != Scheme::FD_SRK) {
                throw UsageError("scheme.name: symplectic needs FD_SRK, got " +
                                 std::string(skgs::to_string(s.scheme)));
            }
        }
    }
    if (cmd == Command::Multisymplectic) {
        for (const auto& s : rc.schemes) {
            if (s.scheme != Scheme::MSFD) {
                throw UsageError("scheme.name: multisymplectic needs MSFD, got " +
                                 std::string(skgs::to_string(s.scheme)));
            }
        }
    }
    return rc;
}

PhysicsParams physics_params(const RunConfig& rc) {
    return make_params(rc.grid, rc.C1, rc.C2, parse_profile(rc.eta1_expr, rc.grid),
                       parse_profile(rc.eta2_expr, rc.grid));
}

int resolve_threads(int flag, int config_value) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("SKGS_THREADS"); env != nullptr && *env != '\0') {
        return default_thread_count();
    }
    if (config_value > 0) return config_value;
    return default_thread_count();
}

}  // namespace skgs::cli
