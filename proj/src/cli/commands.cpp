#include "skgs/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "skgs/cli/csv.hpp"
#include "skgs/error.hpp"
#include "skgs/integrators.hpp"
#include "skgs/noise.hpp"
#include "skgs/symplectic_rk.hpp"
#include "skgs/version.hpp"

namespace skgs::cli {

namespace {

// z-scores use max(stderr, floor) so that runs whose spread is pure
// round-off (C1 = 0 and the like) do not report huge ratios.
double z_floor(double reference) { return 1e-12 * std::max(1.0, std::abs(reference)); }

std::string metadata(Command cmd, const Tree& cfg, Scheme scheme,
                     const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    Tree t = cfg;
    t.put("scheme.name", std::string(to_string(scheme)));
    std::ostringstream out;
    out << "[meta]\n";
    out << "tool = skgs " << kVersion << '\n';
    out << "command = " << to_string(cmd) << '\n';
    out << "generator = " << kGeneratorName << '\n';
    for (const auto& [k, v] : extra) out << k << " = " << v << '\n';
    out << effective_ini(t);
    return out.str();
}

std::string fmt(double x) { return format_number(x); }

FieldState initial_state(const RunConfig& rc, const SpatialOperator& op) {
    return scheme_initial(op, eval_initial(rc.initial, rc.grid));
}

RunResult simulate(const Tree& cfg, const RunConfig& rc, const std::string& out) {
    const SchemeConfig& sc = rc.schemes.front();
    const auto op = make_operator(sc.scheme, rc.grid);
    auto stepper = make_stepper(sc, op, physics_params(rc));
    const int n_steps = sc.step_count();
    const std::uint64_t seed = derive_seed(rc.seed, 0);

    CsvDocument doc;
    doc.set_metadata(metadata(Command::Simulate, cfg, sc.scheme));
    doc.set_columns({"step", "t", "charge", "energy"});
    CsvDocument fields;
    fields.set_metadata(doc.metadata());
    fields.set_columns({"step", "t", "x", "P", "Q", "U", "V"});

    FieldState x = initial_state(rc, *op);
    const double n0 = charge(x, *op);
    double drift = 0.0;
    for (long n = 0;; ++n) {
        const double c = charge(x, *op);
        drift = std::max(drift, std::abs(c - n0));
        doc.add_row({static_cast<double>(n), n * sc.dt, c, energy(x, *op)});
        if (rc.snapshot_stride > 0 && (n % rc.snapshot_stride == 0 || n == n_steps)) {
            for (int j = 0; j < x.size(); ++j) {
                fields.add_row({static_cast<double>(n), n * sc.dt, rc.grid.node(j + 1), x.P[j], x.Q[j],
                                x.U[j], x.V[j]});
            }
        }
        if (n == n_steps) break;
        try {
            stepper->step(x, increment_at(seed, n, sc.dt));
        } catch (const NumericalError& e) {
            throw NumericalError("step " + std::to_string(n) + ": " + e.what());
        }
    }
    doc.add_footer("steps = " + std::to_string(n_steps));
    doc.add_footer("max |charge - charge(0)| = " + fmt(drift));

    RunResult r;
    write_file(out, doc.str());
    r.files.push_back(out);
    if (rc.snapshot_stride > 0) {
        const std::filesystem::path p(out);
        std::filesystem::path fp = p;
        fp.replace_extension();
        const std::string fields_path = fp.string() + ".fields" + p.extension().string();
        write_file(fields_path, fields.str());
        r.files.push_back(fields_path);
    }
    r.summary.push_back(out + ": " + std::to_string(n_steps) + " steps, charge drift " + fmt(drift));
    return r;
}

RunResult law(Command cmd, const Tree& cfg, const RunConfig& rc, const std::string& out,
              int threads) {
    RunResult r;
    for (const SchemeConfig& sc : rc.schemes) {
        const LawSeries s = run_law(cmd, rc, sc, threads);
        const std::string path =
            scheme_output_path(out, std::string(to_string(sc.scheme)), rc.schemes.size());
        CsvDocument doc;
        doc.set_metadata(metadata(cmd, cfg, sc.scheme));
        doc.set_columns({"step", "t", "mean", "stderr", "reference", "coupling_mean",
                         "coupling_stderr", "coupling_integral_mean"});
        const EvolutionRecord& rec = s.record;
        const bool claimed = !s.reference.empty();
        for (std::size_t i = 0; i < rec.size(); ++i) {
            doc.add_row({static_cast<double>(rec.step[i]), rec.t[i], s.mean[i], s.stderror[i],
                         claimed ? s.reference[i] : std::nan(""), rec.coupling.mean[i],
                         rec.coupling.stderror[i], rec.coupling_integral.mean[i]});
        }
        doc.add_footer("samples = " + std::to_string(rec.samples));
        std::string line;
        if (claimed) {
            doc.add_footer("max |mean - reference|/stderr = " + fmt(s.max_z));
            line = path + ": max |mean - reference|/stderr = " + fmt(s.max_z);
        } else {
            doc.add_footer("no theoretical reference claimed");
            line = path + ": no theoretical reference claimed";
        }
        write_file(path, doc.str());
        r.files.push_back(path);
        r.summary.push_back(line);
    }
    return r;
}

RunResult converge(const Tree& cfg, const RunConfig& rc, const std::string& out, int threads) {
    RunResult r;
    for (const SchemeConfig& sc : rc.schemes) {
        ConvergenceSpec spec;
        spec.grid = rc.grid;
        spec.scheme = sc;
        spec.params = physics_params(rc);
        spec.initial = rc.initial;
        spec.dt_list = rc.dt_list;
        spec.reference_dt = rc.reference_dt;
        spec.samples = rc.convergence_samples;
        spec.master_seed = rc.seed;
        spec.threads = threads;
        const ConvergenceResult res = run_convergence(spec);

        const std::string path =
            scheme_output_path(out, std::string(to_string(sc.scheme)), rc.schemes.size());
        CsvDocument doc;
        doc.set_metadata(metadata(Command::Converge, cfg, sc.scheme,
                                  {{"error_norm", "discrete L2 over (P, Q, U, V) at T"},
                                   {"reference", "same scheme at convergence.reference_dt"}}));
        doc.set_columns({"dt", "rms_error"});
        for (std::size_t i = 0; i < res.dt.size(); ++i) doc.add_row({res.dt[i], res.rms_error[i]});
        doc.add_footer("samples = " + std::to_string(spec.samples));
        doc.add_footer("slope = " + fmt(res.slope));
        write_file(path, doc.str());
        r.files.push_back(path);
        r.summary.push_back(path + ": slope = " + fmt(res.slope));
    }
    return r;
}

RunResult wedge(Command cmd, const Tree& cfg, const RunConfig& rc, const std::string& out) {
    RunResult r;
    for (const SchemeConfig& sc : rc.schemes) {
        const WedgeReport w = run_wedge(rc, sc);
        const std::string path =
            scheme_output_path(out, std::string(to_string(sc.scheme)), rc.schemes.size());
        CsvDocument doc;
        doc.set_metadata(metadata(cmd, cfg, sc.scheme));
        std::vector<std::string> cols{"step", "t"};
        const char* name = cmd == Command::Symplectic ? "omega_" : "wedge_";
        for (int k = 0; k < rc.tangents.pairs; ++k) cols.push_back(name + std::to_string(k));
        cols.push_back("max_rel_deviation");
        if (cmd == Command::Multisymplectic) cols.push_back("closure_residual");
        doc.set_columns(cols);
        for (std::size_t n = 0; n < w.t.size(); ++n) {
            std::vector<double> row{static_cast<double>(n), w.t[n]};
            row.insert(row.end(), w.values[n].begin(), w.values[n].end());
            row.push_back(w.deviation[n]);
            if (cmd == Command::Multisymplectic) row.push_back(w.closure[n]);
            doc.add_row(row);
        }
        doc.add_footer("max relative deviation = " + fmt(w.max_deviation));
        write_file(path, doc.str());
        r.files.push_back(path);
        r.summary.push_back(path + ": max relative deviation = " + fmt(w.max_deviation));
    }
    return r;
}

FieldState random_tangent(const TangentSpec& spec, int index, int n) {
    FieldState d = FieldState::zeros(n);
    if (spec.zero) return d;
    Vec* parts[] = {&d.P, &d.Q, &d.U, &d.V};
    for (std::uint32_t c = 0; c < 4; ++c) {
        for (int j = 0; j < n; ++j) {
            (*parts[c])[j] = counter_normal(spec.seed, static_cast<std::uint64_t>(index),
                                            c * static_cast<std::uint32_t>(n) + j);
        }
    }
    return d;
}

}  // namespace

bool law_claimed(Scheme s) { return is_linearly_implicit(s); }

std::string scheme_output_path(const std::string& out, const std::string& scheme, std::size_t count) {
    if (count <= 1) return out;
    const std::filesystem::path p(out);
    std::filesystem::path stem = p;
    stem.replace_extension();
    return stem.string() + "_" + scheme + p.extension().string();
}

LawSeries run_law(Command cmd, const RunConfig& rc, const SchemeConfig& scheme, int threads) {
    if (cmd != Command::ChargeLaw && cmd != Command::EnergyLaw) {
        throw UsageError("run_law: not a law command");
    }
    EnsembleSpec spec;
    spec.grid = rc.grid;
    spec.scheme = scheme;
    spec.params = physics_params(rc);
    spec.initial = rc.initial;
    spec.samples = rc.samples;
    spec.master_seed = rc.seed;
    spec.record_stride = rc.record_stride;
    spec.threads = threads;

    LawSeries s;
    s.record = run_ensemble(spec);
    const EvolutionRecord& rec = s.record;
    const SeriesStats& series = cmd == Command::ChargeLaw ? rec.charge : rec.energy;
    s.mean = series.mean;
    s.stderror = series.stderror;
    if (!law_claimed(scheme.scheme)) return s;

    const auto op = make_operator(scheme.scheme, rc.grid);
    const Vec e1 = scheme_profile(*op, spec.params.eta1, spec.params.eta1_fn);
    const Vec e2 = scheme_profile(*op, spec.params.eta2, spec.params.eta2_fn);
    const LawConstants k = law_constants(*op, rc.C1, rc.C2, e1, e2);
    const double x0 = s.mean.front();
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const double ref = cmd == Command::ChargeLaw
                               ? charge_law_reference(x0, k, rec.t[i])
                               : energy_law_reference(x0, k, rec.t[i], rec.coupling_integral.mean[i]);
        s.reference.push_back(ref);
        const double diff = std::abs(s.mean[i] - ref);
        s.max_z = std::max(s.max_z, diff / std::max(s.stderror[i], z_floor(ref)));
    }
    return s;
}

WedgeReport run_wedge(const RunConfig& rc, const SchemeConfig& sc) {
    const bool multi = sc.scheme == Scheme::MSFD;
    if (!multi && sc.scheme != Scheme::FD_SRK) {
        throw UsageError("scheme.name: tangent reports need FD_SRK or MSFD");
    }
    const auto op = make_operator(sc.scheme, rc.grid);
    auto stepper = make_stepper(sc, op, physics_params(rc));
    FieldState x = initial_state(rc, *op);
    const int n = x.size();
    const int pairs = rc.tangents.pairs;
    std::vector<FieldState> tangents;
    for (int k = 0; k < 2 * pairs; ++k) tangents.push_back(random_tangent(rc.tangents, k, n));
    const std::uint64_t seed = derive_seed(rc.seed, 0);

    auto form = [&](const FieldState& a, const FieldState& b) {
        return multi ? multisymplectic_functional(a, b) : symplectic_form(a, b, rc.grid);
    };
    WedgeReport w;
    std::vector<double> first;
    for (int step = 0; step <= rc.tangents.steps; ++step) {
        std::vector<double> v;
        for (int k = 0; k < pairs; ++k) v.push_back(form(tangents[2 * k], tangents[2 * k + 1]));
        if (step == 0) first = v;
        double dev = 0.0;
        for (int k = 0; k < pairs; ++k) {
            const double d = std::abs(v[k] - first[k]);
            dev = std::max(dev, first[k] != 0.0 ? d / std::abs(first[k]) : d);
        }
        w.t.push_back(step * sc.dt);
        w.values.push_back(v);
        w.deviation.push_back(dev);
        w.max_deviation = std::max(w.max_deviation, dev);
        if (multi) w.closure.push_back(closure_residual(to_multisym(x, rc.grid), rc.grid));
        if (step == rc.tangents.steps) break;
        try {
            stepper->step_with_tangents(x, increment_at(seed, step, sc.dt), tangents);
        } catch (const NumericalError& e) {
            throw NumericalError("step " + std::to_string(step) + ": " + e.what());
        }
    }
    return w;
}

RunResult run_command(Command cmd, const Tree& cfg, const std::string& out, int threads) {
    if (out.empty()) throw UsageError("output.path: no output path given (use --out)");
    const RunConfig rc = resolve(cfg, cmd);
    switch (cmd) {
    case Command::Simulate:
        return simulate(cfg, rc, out);
    case Command::ChargeLaw:
    case Command::EnergyLaw:
        return law(cmd, cfg, rc, out, threads);
    case Command::Converge:
        return converge(cfg, rc, out, threads);
    case Command::Symplectic:
    case Command::Multisymplectic:
        return wedge(cmd, cfg, rc, out);
    }
    throw Error("unhandled command");
}

RunResult replay(const std::string& in, const std::string& out, int threads) {
    const std::string text = read_metadata(in);
    Tree src;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, src);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError(in + ": unreadable metadata block: " + e.message());
    }
    const auto meta = src.find("meta");
    if (meta == src.not_found() || !meta->second.get_optional<std::string>("command")) {
        throw UsageError(in + ": metadata has no [meta] command");
    }
    const Command cmd = parse_command(meta->second.get<std::string>("command"));
    src.erase("meta");
    Tree cfg = default_config(cmd);
    merge_tree(cfg, src, in);
    return run_command(cmd, cfg, out, threads);
}

}  // namespace skgs::cli
