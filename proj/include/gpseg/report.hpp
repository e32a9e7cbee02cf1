#pragma once

#include <string>
#include <vector>

#include "gpseg/config.hpp"
#include "gpseg/pipeline.hpp"

namespace gpseg {

/// One acceptance criterion outcome.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double value = 0;      // headline number (slope, gap, ...)
    std::string detail;    // free-form summary
};

struct AcceptanceReport {
    std::vector<CriterionResult> criteria;
    bool all_pass() const {
        for (const auto& c : criteria)
            if (!c.pass) return false;
        return true;
    }
};

struct AcceptanceOptions {
    bool quick = false;  // skip the slowest criteria (used by unit tests)
};

/// Runs the twelve acceptance criteria on the configured pipeline.
AcceptanceReport run_acceptance(const ExperimentConfig& cfg,
                                const AcceptanceOptions& opt = {});

/// CSV writers: header row, comma separated, 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<const std::vector<double>*>& data);

/// Orchestration used by the CLI subcommands; every artifact lands under
/// cfg.output_dir and is listed in the manifest.
struct RunArtifacts {
    std::vector<std::string> files;
    std::string report_json;  // path of report.json when written
};

RunArtifacts run_profile_stage(const ExperimentConfig& cfg);
RunArtifacts run_outer_stage(const ExperimentConfig& cfg);
RunArtifacts run_construct_stage(const ExperimentConfig& cfg,
                                 const std::vector<double>& gs);
RunArtifacts run_solve_stage(const ExperimentConfig& cfg,
                             const std::vector<double>& gs);
RunArtifacts run_sweep_stage(const ExperimentConfig& cfg);
RunArtifacts write_verify_report(const ExperimentConfig& cfg,
                                 const AcceptanceReport& rep);

void write_manifest(const ExperimentConfig& cfg, const std::string& stage,
                    const RunArtifacts& artifacts, bool pass);

}  // namespace gpseg
