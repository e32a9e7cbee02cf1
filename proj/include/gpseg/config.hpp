#pragma once

#include <string>

#include "gpseg/pipeline.hpp"

namespace gpseg {

/// Experiment configuration as loaded from JSON. Thin wrapper over
/// PipelineConfig plus run options; validation errors name the field.
struct ExperimentConfig {
    PipelineConfig pipeline;
    std::string output_dir = "out";
    double blowup_T = 8.0;       // standalone profile runs
    int blowup_n_nodes = 24001;
    int threads = 1;

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);

    /// Canonical JSON (sorted keys, full precision) used for hashing and
    /// reproducibility.
    std::string canonical_json() const;
    std::string config_hash() const;  // FNV-1a 64 over the canonical form
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gpseg
