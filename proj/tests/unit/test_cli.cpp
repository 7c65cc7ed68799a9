#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "helpers.hpp"
#include "skgs/cli/commands.hpp"
#include "skgs/cli/config.hpp"
#include "skgs/cli/csv.hpp"
#include "skgs/error.hpp"

using namespace skgs;
using namespace skgs::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string usage_message(Command cmd, const std::vector<std::string>& sets) {
    Tree cfg = default_config(cmd);
    try {
        for (const auto& s : sets) apply_override(cfg, s);
        resolve(cfg, cmd);
    } catch (const UsageError& e) {
        return e.what();
    }
    return "";
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(SKGS_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Tree quick(Command cmd, const std::vector<std::string>& sets) {
    Tree cfg = default_config(cmd);
    for (const auto& s : sets) apply_override(cfg, s);
    return cfg;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config: defaults per command") {
    const RunConfig charge = resolve(default_config(Command::ChargeLaw), Command::ChargeLaw);
    CHECK(charge.grid.M == 16);
    CHECK(charge.schemes.front().dt == 25.0 / 256);
    CHECK(charge.schemes.front().T == 50.0);
    CHECK(charge.initial.kind == InitialData::Kind::ZeroWithUnitVelocity);
    const RunConfig energy = resolve(default_config(Command::EnergyLaw), Command::EnergyLaw);
    CHECK(energy.grid.M == 8);
    CHECK(energy.schemes.front().dt == 25.0 / 1024);
    const RunConfig conv = resolve(default_config(Command::Converge), Command::Converge);
    CHECK(conv.grid.h == 15.0 / 128);
    CHECK(conv.dt_list == std::vector<double>{0.125, 0.0625, 0.03125, 0.015625});
    CHECK(conv.reference_dt == 1.0 / 256);
    CHECK(conv.initial.theta == 0.3);
    CHECK(resolve(default_config(Command::Symplectic), Command::Symplectic).schemes.front().scheme ==
          Scheme::FD_SRK);
}

TEST_CASE("config: INI merge and overrides") {
    Tree cfg = default_config(Command::ChargeLaw);
    merge_ini_text(cfg, "[grid]\nM = 32\n[scheme]\nname = CFD_I, SPS_II\n", "test.ini");
    apply_override(cfg, "noise.C1=0.5");
    const RunConfig rc = resolve(cfg, Command::ChargeLaw);
    CHECK(rc.grid.M == 32);
    REQUIRE(rc.schemes.size() == 2);
    CHECK(rc.schemes[1].scheme == Scheme::SPS_II);
    CHECK(rc.C1 == 0.5);

    CHECK_THROWS_AS(merge_ini_text(cfg, "[grid]\nN = 3\n", "x"), UsageError);
    CHECK_THROWS_AS(merge_ini_text(cfg, "[gird]\nM = 3\n", "x"), UsageError);
    CHECK_THROWS_AS(merge_ini_text(cfg, "M = 3\n", "x"), UsageError);
    CHECK_THROWS_AS(apply_override(cfg, "grid.M"), UsageError);
    CHECK_THROWS_AS(apply_override(cfg, "M=3"), UsageError);
    CHECK_THROWS_AS(apply_override(cfg, "grid.Q=3"), UsageError);
    CHECK_THROWS_AS(merge_ini_file(cfg, "/nonexistent/file.ini"), IoError);
}

TEST_CASE("config: errors name the field") {
    CHECK(usage_message(Command::Simulate, {"grid.M=1"}).find("grid.M") != std::string::npos);
    CHECK(usage_message(Command::Simulate, {"grid.M=2.5"}).find("grid.M") != std::string::npos);
    CHECK(usage_message(Command::Simulate, {"scheme.dt=abc"}).find("scheme.dt") != std::string::npos);
    CHECK(usage_message(Command::Simulate, {"scheme.dt=0.3"}).find("scheme.T") != std::string::npos);
    CHECK(usage_message(Command::Simulate, {"scheme.name=RK4"}).find("scheme.name") != std::string::npos);
    CHECK(usage_message(Command::Simulate, {"scheme.name=CFD_I,SPS_I"}).find("scheme.name") !=
          std::string::npos);
    CHECK(usage_message(Command::Simulate, {"initial.kind=gauss"}).find("initial.kind") !=
          std::string::npos);
    CHECK(usage_message(Command::Simulate, {"initial.theta=1.5"}).find("initial.theta") !=
          std::string::npos);
    CHECK(usage_message(Command::Simulate, {"ensemble.seed=-4"}).find("ensemble.seed") !=
          std::string::npos);
    CHECK(usage_message(Command::Simulate, {"noise.eta1=sin(y)"}).find("noise.eta1") !=
          std::string::npos);
    CHECK(usage_message(Command::Simulate, {"scheme.msfd_literal_mix=maybe"})
              .find("scheme.msfd_literal_mix") != std::string::npos);
    CHECK(usage_message(Command::Converge, {"convergence.dt_list=2^-4, 2^-3"})
              .find("convergence.dt_list") != std::string::npos);
    CHECK(usage_message(Command::Converge, {"convergence.reference_dt=0.3"})
              .find("convergence.reference_dt") != std::string::npos);
    CHECK(usage_message(Command::Symplectic, {"scheme.name=CFD_I"}).find("FD_SRK") != std::string::npos);
    CHECK(usage_message(Command::Multisymplectic, {"scheme.name=FD_SRK"}).find("MSFD") !=
          std::string::npos);
    CHECK(usage_message(Command::Simulate, {"scheme.stages=3", "scheme.alpha=0.1,0.2,0.3"})
              .find("scheme.alpha") != std::string::npos);
    CHECK(usage_message(Command::Simulate, {"tangents.kind=sobol"}).find("tangents.kind") !=
          std::string::npos);
    CHECK(usage_message(Command::Simulate, {}).empty());
}

TEST_CASE("config: alpha expansion") {
    const RunConfig rc = resolve(quick(Command::Symplectic, {"scheme.stages=3", "scheme.alpha=0.1"}),
                                 Command::Symplectic);
    CHECK(rc.schemes.front().alpha == std::vector<double>{0.1, 0.1});
    const RunConfig one = resolve(quick(Command::Symplectic, {"scheme.stages=1"}), Command::Symplectic);
    CHECK(one.schemes.front().alpha.empty());
}

TEST_CASE("metadata excludes thread count and output path") {
    Tree cfg = default_config(Command::Simulate);
    apply_override(cfg, "run.threads=7");
    apply_override(cfg, "output.path=/tmp/x.csv");
    const std::string ini = effective_ini(cfg);
    CHECK(ini.find("threads") == std::string::npos);
    CHECK(ini.find("/tmp/x.csv") == std::string::npos);
    CHECK(ini.find("[grid]\na = -15\n") != std::string::npos);
    CHECK(ini.find("snapshot_stride = 0") != std::string::npos);
}

TEST_CASE("thread precedence") {
    CHECK(resolve_threads(3, 5) == 3);
    unsetenv("SKGS_THREADS");
    CHECK(resolve_threads(0, 5) == 5);
    setenv("SKGS_THREADS", "2", 1);
    CHECK(resolve_threads(0, 5) == 2);
    CHECK(resolve_threads(4, 5) == 4);
    setenv("SKGS_THREADS", "lots", 1);
    CHECK_THROWS_AS(resolve_threads(0, 5), UsageError);
    unsetenv("SKGS_THREADS");
    CHECK(resolve_threads(0, 0) >= 1);
}

TEST_CASE("csv formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(-2.0) == "-2");
    CHECK(std::strtod(format_number(1e-300).c_str(), nullptr) == 1e-300);
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(std::strtod(format_number(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);

    CsvDocument doc;
    doc.set_metadata("[meta]\ncommand = x\n");
    doc.set_columns({"a", "b"});
    doc.add_row({1.0, 0.5});
    doc.add_footer("done = 1");
    CHECK(doc.str() == "# [meta]\n# command = x\na,b\n1,0.5\n# done = 1\n");
    CHECK_THROWS_AS(doc.add_row({1.0}), Error);
}

TEST_CASE("simulate: zero noise keeps the charge column constant") {
    const auto dir = testing::scratch_dir("simulate");
    const std::string out = (dir / "sim.csv").string();
    const Tree cfg = quick(Command::Simulate, {"noise.C1=0", "noise.C2=0", "scheme.T=100*2^-8",
                                               "grid.M=128", "output.snapshot_stride=50"});
    const RunResult r = run_command(Command::Simulate, cfg, out, 1);
    REQUIRE(r.files.size() == 2);
    const CsvTable t = read_csv(out);
    CHECK(t.columns == std::vector<std::string>{"step", "t", "charge", "energy"});
    REQUIRE(t.rows.size() == 101);
    const auto q = t.column("charge");
    for (double v : q) CHECK(testing::rel_diff(v, q.front()) < 1e-10);
    const auto h = t.column("energy");
    for (double v : h) CHECK(testing::rel_diff(v, h.front()) < 1e-10);  // CFD_I conserves energy too
    const CsvTable f = read_csv(r.files[1]);
    CHECK(f.rows.size() == 3 * 127);

    const std::string again = (dir / "sim2.csv").string();
    run_command(Command::Simulate, cfg, again, 1);
    CHECK(slurp(out) == slurp(again));
    CHECK_THROWS_AS(run_command(Command::Simulate, cfg, "", 1), UsageError);
}

TEST_CASE("simulate: file layout") {
    const auto dir = testing::scratch_dir("layout");
    const std::string out = (dir / "a.csv").string();
    run_command(Command::Simulate, quick(Command::Simulate, {"scheme.T=2^-8", "grid.M=16"}), out, 1);
    const std::string text = slurp(out);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind("# [meta]\n# tool = skgs ", 0) == 0);
    CHECK(text.find("# generator = ") != std::string::npos);
    CHECK(text.find("# seed = 20240601") != std::string::npos);
    CHECK(text.find("# name = CFD_I") != std::string::npos);
    CHECK(text.find("# dt = 2^-8") != std::string::npos);
}

TEST_CASE("charge law: no noise in phi gives constant mean and reference") {
    const auto dir = testing::scratch_dir("charge");
    const std::string out = (dir / "q.csv").string();
    const Tree cfg = quick(Command::ChargeLaw, {"noise.C1=0", "scheme.T=50*25/2^8",
                                                "ensemble.samples=8"});
    run_command(Command::ChargeLaw, cfg, out, 2);
    const CsvTable t = read_csv(out);
    const auto mean = t.column("mean"), ref = t.column("reference");
    for (std::size_t i = 0; i < mean.size(); ++i) {
        CHECK(mean[i] == doctest::Approx(mean.front()).epsilon(1e-12).scale(1e-12));
        CHECK(ref[i] == ref.front());
    }
    bool has_footer = false;
    for (const auto& f : t.footer) has_footer |= f.rfind("max |mean - reference|/stderr = ", 0) == 0;
    CHECK(has_footer);
}

TEST_CASE("energy law: no claim for the Runge-Kutta schemes; one file per scheme") {
    const auto dir = testing::scratch_dir("energy");
    const std::string out = (dir / "e.csv").string();
    const Tree cfg = quick(Command::EnergyLaw, {"scheme.name=FD_SRK, CFD_I", "scheme.T=40*25/2^10",
                                                "ensemble.samples=4"});
    const RunResult r = run_command(Command::EnergyLaw, cfg, out, 1);
    REQUIRE(r.files.size() == 2);
    CHECK(r.files[0] == (dir / "e_FD_SRK.csv").string());
    CHECK(r.files[1] == (dir / "e_CFD_I.csv").string());
    const CsvTable srk = read_csv(r.files[0]);
    CHECK(std::find(srk.footer.begin(), srk.footer.end(), "no theoretical reference claimed") !=
          srk.footer.end());
    CHECK(std::isnan(srk.column("reference").front()));
    const CsvTable cfd = read_csv(r.files[1]);
    CHECK(std::find(cfd.footer.begin(), cfd.footer.end(), "no theoretical reference claimed") ==
          cfd.footer.end());
}

TEST_CASE("converge: the reference step alone gives one zero row") {
    const auto dir = testing::scratch_dir("converge");
    const std::string out = (dir / "c.csv").string();
    const Tree cfg = quick(Command::Converge, {"convergence.dt_list=2^-8", "convergence.samples=1",
                                              "grid.M=32", "scheme.T=2^-4"});
    run_command(Command::Converge, cfg, out, 1);
    const CsvTable t = read_csv(out);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == 1.0 / 256);
    CHECK(t.rows[0][1] == 0.0);
    CHECK(std::find(t.footer.begin(), t.footer.end(), "slope = nan") != t.footer.end());
    CHECK(slurp(out).find("# error_norm = ") != std::string::npos);
}

TEST_CASE("symplectic: zero tangents give an all-zero report") {
    const auto dir = testing::scratch_dir("symplectic");
    const std::string out = (dir / "s.csv").string();
    run_command(Command::Symplectic, quick(Command::Symplectic, {"tangents.kind=zero", "grid.M=32"}),
                out, 1);
    const CsvTable t = read_csv(out);
    REQUIRE(t.rows.size() == 11);
    for (const auto& row : t.rows) {
        for (std::size_t j = 2; j < row.size(); ++j) CHECK(row[j] == 0.0);
    }
}

TEST_CASE("symplectic and multisymplectic reports conserve their wedge") {
    const auto dir = testing::scratch_dir("wedge");
    for (Command cmd : {Command::Symplectic, Command::Multisymplectic}) {
        const std::string out = (dir / "w.csv").string();
        run_command(cmd, quick(cmd, {"grid.M=64"}), out, 1);
        const CsvTable t = read_csv(out);
        CHECK(t.columns.size() == (cmd == Command::Symplectic ? 11u : 12u));
        for (double d : t.column("max_rel_deviation")) CHECK(d <= 1e-8);
    }
}

TEST_CASE("replay reproduces a file byte for byte") {
    const auto dir = testing::scratch_dir("replay");
    const std::string out = (dir / "q.csv").string();
    const Tree cfg = quick(Command::ChargeLaw, {"scheme.name=CFD_I,FEM_II", "ensemble.samples=20",
                                                "scheme.T=64*25/2^8", "ensemble.record_stride=5"});
    const RunResult r = run_command(Command::ChargeLaw, cfg, out, 2);
    for (const std::string& f : r.files) {
        const std::string copy = (dir / "replayed.csv").string();
        replay(f, copy, 3);
        CHECK(slurp(f) == slurp(copy));
    }
    const std::string sim = (dir / "sim.csv").string();
    run_command(Command::Simulate,
                quick(Command::Simulate, {"scheme.name=FEM_I", "scheme.T=10*2^-8", "grid.M=32"}), sim, 1);
    replay(sim, (dir / "sim_again.csv").string(), 1);
    CHECK(slurp(sim) == slurp(dir / "sim_again.csv"));
    CHECK_THROWS_AS(replay((dir / "missing.csv").string(), (dir / "x.csv").string(), 1), IoError);
}

TEST_CASE("tool exit codes") {
    const auto dir = testing::scratch_dir("tool");
    const std::string out = (dir / "t.csv").string();
    CHECK(run_tool("simulate --out " + out + " --set scheme.T=2^-8 --set grid.M=16") == 0);
    CHECK(run_tool("simulate") == 2);
    CHECK(run_tool("simulate --out " + out + " --set grid.M=1") == 2);
    CHECK(run_tool("frobnicate") == 2);
    CHECK(run_tool("converge --out " + out + " --set convergence.dt_list=2^-4,2^-3") == 2);
    CHECK(run_tool("simulate --out /nonexistent/dir/t.csv --set scheme.T=2^-8 --set grid.M=16") == 4);
    CHECK(run_tool("simulate --config /nonexistent.ini --out " + out) == 4);
    CHECK(run_tool("simulate --out " + out +
                   " --set scheme.name=FD_SRK --set scheme.fp_max_iter=1 --set scheme.dt=0.25") == 3);
    CHECK(run_tool("charge-law --out " + out + " --seed 5 --threads 2 --set ensemble.samples=4 "
                   "--set scheme.T=8*25/2^8") == 0);
    CHECK(slurp(out).find("# seed = 5\n") != std::string::npos);
    CHECK(run_tool("--version") == 0);
}

}
