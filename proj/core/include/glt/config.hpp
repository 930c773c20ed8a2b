#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "glt/pipeline.hpp"
#include "glt/scoring.hpp"

namespace glt {

// Thrown for malformed config text or bad field values; the CLI maps it to
// the validation exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat INI: [section] headers, key = value lines, # or ; comments. No
// nesting, no quoting, duplicate keys rejected.
struct ConfigFile {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin);
};

// One `run` invocation.
struct CliRunSpec {
    std::string dataset;       // dataset directory, required
    std::string dataset_name;  // defaults to the directory basename
    std::string out_dir;       // ticket bundle directory, optional
    std::string metrics_csv;   // append a metrics row here, optional
    ScorerKind scorer = ScorerKind::teddy;
    idx k = -1;  // simulation index; sets p_g = sparsity_target(k) when >= 0
    RunConfig run;
};

CliRunSpec parse_run_spec(const ConfigFile& cfg);

// One `sweep` invocation: scorers x k_grid x seeds.
struct CliSweepSpec {
    enum class PThetaMode { zero, match_k, fixed };

    std::string dataset;
    std::string dataset_name;
    std::string out_csv;
    std::vector<ScorerKind> scorers;
    std::vector<idx> k_grid;
    std::vector<std::uint64_t> seeds;
    PThetaMode p_theta_mode = PThetaMode::zero;
    double p_theta_value = 0.0;
    RunConfig base;
};

CliSweepSpec parse_sweep_spec(const ConfigFile& cfg);

}  // namespace glt
