// gpseg: construction and verification of segregated two-component
// condensate solutions at large coupling.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpseg/config.hpp"
#include "gpseg/report.hpp"

using namespace gpseg;

int main(int argc, char** argv) {
    CLI::App app{"segregated Gross-Pitaevskii construction at large coupling"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    double g_override = 0.0;
    int threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--g", g_override, "run a single coupling value");
        sub->add_option("--threads", threads, "worker threads for the sweep");
    };

    CLI::App* cmd_profile = app.add_subcommand("profile", "solve and cache the blow-up profile");
    CLI::App* cmd_outer = app.add_subcommand("outer", "limit problem and nondegeneracy report");
    CLI::App* cmd_construct =
        app.add_subcommand("construct", "matching, gluing and remainder per g");
    CLI::App* cmd_solve = app.add_subcommand("solve", "full nonlinear solve per g");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "construct + solve over the ladder");
    CLI::App* cmd_verify = app.add_subcommand("verify", "acceptance criteria and report");
    for (auto* sub : {cmd_profile, cmd_outer, cmd_construct, cmd_solve, cmd_sweep, cmd_verify})
        add_common(sub);

    CLI11_PARSE(app, argc, argv);

    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = ExperimentConfig::from_json_file(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (threads > 0) cfg.threads = threads;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    std::vector<double> gs = cfg.pipeline.g_list;
    if (g_override > 0.0) gs = {g_override};

    try {
        const std::string stage = app.get_subcommands().front()->get_name();
        RunArtifacts art;
        bool pass = true;
        if (stage == "profile") {
            art = run_profile_stage(cfg);
        } else if (stage == "outer") {
            art = run_outer_stage(cfg);
        } else if (stage == "construct") {
            art = run_construct_stage(cfg, gs);
        } else if (stage == "solve") {
            art = run_solve_stage(cfg, gs);
        } else if (stage == "sweep") {
            art = run_sweep_stage(cfg);
        } else {
            auto rep = run_acceptance(cfg);
            for (const auto& c : rep.criteria)
                std::printf("%s criterion %2d: %s  [%s]\n", c.pass ? "PASS" : "FAIL",
                            c.id, c.name.c_str(), c.detail.c_str());
            art = write_verify_report(cfg, rep);
            pass = rep.all_pass();
        }
        write_manifest(cfg, stage, art, pass);
        if (!pass) return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gpseg: preflight gate failed: %s\n", e.what());
        return 1;
    }
    return 0;
}
