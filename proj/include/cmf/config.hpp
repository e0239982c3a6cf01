#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "cmf/particle.hpp"

namespace cmf {

inline const std::set<std::string> kKnownStatistics = {
    "mse", "symdiff", "triangle", "lambda2", "hydro", "cond_chaos", "multigraphon"};

// Full experiment description: model parameters plus orchestration.
// model.n is set per n_grid cell by the orchestrator and is not part of the
// serialized form.
struct ExperimentConfig {
  ModelConfig model;
  std::vector<int> n_grid{50, 200, 800};
  int replicates = 20;
  int reference_samples = 1000;
  int iterations = 10;
  int burn_in = 10;
  std::filesystem::path output_dir = "out";
  std::set<std::string> statistics{"lambda2", "mse", "symdiff", "triangle"};
  bool fresh_iteration_noise = false;  // iteration noise scheme, see ReferenceOptions
  bool binary_dumps = false;           // opt-in CMF1 run dumps

  void validate() const;  // throws ConfigError
};

// Built-in parameter sets. "desk" finishes in minutes on one core; "paper"
// matches the full-scale study parameters (hours of compute).
ExperimentConfig desk_preset();
ExperimentConfig paper_preset();
ExperimentConfig preset_by_name(const std::string& name);

// Flat sectioned key/value text: "[section]" headers, "key = value" rows,
// '#' starts a comment. Sections: [model], [kernel], [experiment]. A present
// [model] section must contain d, T and gamma; a present [kernel] section
// must contain variant plus that variant's parameters; everything else
// overrides the base config. Errors carry line numbers and field names.
ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base);
ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base);

// Canonical form: fixed section and key order, shortest round-trip numbers.
// parse(serialize(c)) followed by serialize is byte-identical (idempotence).
std::string serialize_config(const ExperimentConfig& config);

}  // namespace cmf
