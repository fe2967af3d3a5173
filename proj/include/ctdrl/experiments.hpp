#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctdrl/env.hpp"
#include "ctdrl/sde.hpp"

namespace ctdrl {

inline constexpr const char* kVersion = "ctdrl 0.1.0";

// Parsed experiment configuration plus the normalized JSON the provenance
// hash is computed from. Experiments fill in defaults for anything omitted.
struct ExperimentConfig {
    std::string experiment;
    bool has_env = false;
    EnvModel model;
    std::vector<int> n_list;
    SimConfig sim;
    std::uint64_t seed = 0;
    std::string canonical_json;
};

ExperimentConfig experiment_config_from_json(const std::string& text, const std::string& experiment_name);
ExperimentConfig experiment_config_from_file(const std::string& path, const std::string& experiment_name);

struct Check {
    std::string name;
    bool passed = false;
};

struct MetricRow {
    std::string label;
    Vec values;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<std::string> columns;  // first column is the row label
    std::vector<MetricRow> rows;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, double>> scalars;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string version = kVersion;

    bool passed() const;
};

// Writes report.json, metrics.csv, and plot.gp into out_dir (created if
// missing). Byte-identical for identical (config, seed).
void write_report_artifacts(const ExperimentReport& report, const std::string& out_dir);

ExperimentReport run_quantile_bound(const ExperimentConfig& cfg);
ExperimentReport run_weak_norm(const ExperimentConfig& cfg);
ExperimentReport run_shjb_decay(const ExperimentConfig& cfg, const std::string& out_dir = "");
ExperimentReport run_hjb_consistency(const ExperimentConfig& cfg);

// Dispatch by cfg.experiment; writes artifacts and returns the report.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace ctdrl
