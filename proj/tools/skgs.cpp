// Command-line front end. Exit codes: 0 ok, 2 usage or config, 3 numerical
// failure, 4 I/O, 1 anything else.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skgs/cli/commands.hpp"
#include "skgs/cli/config.hpp"
#include "skgs/error.hpp"
#include "skgs/version.hpp"

namespace {

struct Options {
    std::string config;
    std::optional<std::string> seed;
    int threads = 0;
    std::string out;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "INI configuration file");
    sub->add_option("--seed", o.seed, "master seed (ensemble.seed)");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output CSV path (output.path)");
    sub->add_option("--set", o.sets, "override, section.key=value")->take_all();
}

int run(int argc, char** argv) {
    CLI::App app{"Solvers for the stochastic Klein-Gordon-Schrodinger system"};
    app.set_version_flag("--version", std::string(skgs::kVersion));
    app.require_subcommand(1);

    Options o;
    std::vector<std::pair<skgs::cli::Command, CLI::App*>> subs;
    const std::pair<skgs::cli::Command, const char*> commands[] = {
        {skgs::cli::Command::Simulate, "single path, charge and energy per step"},
        {skgs::cli::Command::ChargeLaw, "ensemble mean charge against the linear law"},
        {skgs::cli::Command::EnergyLaw, "ensemble mean energy against its evolution law"},
        {skgs::cli::Command::Converge, "mean-square error against a fine reference"},
        {skgs::cli::Command::Symplectic, "symplectic 2-form along FD_SRK tangents"},
        {skgs::cli::Command::Multisymplectic, "multi-symplectic functional along MSFD tangents"},
    };
    for (const auto& [cmd, help] : commands) {
        CLI::App* sub = app.add_subcommand(std::string(skgs::cli::to_string(cmd)), help);
        add_common(sub, o);
        subs.emplace_back(cmd, sub);
    }
    std::string replay_in, replay_out;
    int replay_threads = 0;
    CLI::App* rep = app.add_subcommand("replay", "re-run the configuration stored in a CSV header");
    rep->add_option("--in", replay_in, "CSV written by this tool")->required();
    rep->add_option("--out", replay_out, "where to write the re-run")->required();
    rep->add_option("--threads", replay_threads, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    skgs::cli::RunResult result;
    if (rep->parsed()) {
        result = skgs::cli::replay(replay_in, replay_out, skgs::cli::resolve_threads(replay_threads, 0));
    } else {
        for (const auto& [cmd, sub] : subs) {
            if (!sub->parsed()) continue;
            skgs::cli::Tree cfg = skgs::cli::default_config(cmd);
            if (!o.config.empty()) skgs::cli::merge_ini_file(cfg, o.config);
            for (const std::string& s : o.sets) skgs::cli::apply_override(cfg, s);
            if (o.seed) skgs::cli::apply_override(cfg, "ensemble.seed=" + *o.seed);
            if (!o.out.empty()) skgs::cli::apply_override(cfg, "output.path=" + o.out);
            const skgs::cli::RunConfig rc = skgs::cli::resolve(cfg, cmd);
            result = skgs::cli::run_command(cmd, cfg, rc.out,
                                            skgs::cli::resolve_threads(o.threads, rc.threads));
        }
    }
    for (const std::string& line : result.summary) std::cout << line << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const skgs::UsageError& e) {
        std::cerr << "skgs: " << e.what() << '\n';
        return 2;
    } catch (const skgs::NumericalError& e) {
        std::cerr << "skgs: numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const skgs::IoError& e) {
        std::cerr << "skgs: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "skgs: " << e.what() << '\n';
        return 1;
    }
}
