#pragma once

#include <string>
#include <vector>

#include "cmf/config.hpp"

namespace cmf {

// One experiment stage each: validate, compute, persist under
// config.output_dir, then write manifest_<command>.json (config hash, seed,
// software version, stage timings, file inventory with checksums). Returns
// the relative paths of every file written, manifest included. workers >= 1;
// results are byte-identical for any worker count.
std::vector<std::string> run_simulate(const ExperimentConfig& config, int workers);
std::vector<std::string> run_meanfield(const ExperimentConfig& config, int workers);
std::vector<std::string> run_couple_stats(const ExperimentConfig& config, int workers);
std::vector<std::string> run_graphon(const ExperimentConfig& config, int workers);
std::vector<std::string> run_report(const ExperimentConfig& config, int workers);

// FNV-1a 64 hex of the canonical config serialization.
std::string config_hash(const ExperimentConfig& config);

}  // namespace cmf
