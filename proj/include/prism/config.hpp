#ifndef PRISM_CONFIG_HPP
#define PRISM_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "prism/prism.hpp"

namespace prism {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string env = "braking";
  EnvParams params;
  PrismConfig prism;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  // oracle / evaluation settings
  int grid_res = 200;
  int oracle_m = 20;
  std::vector<double> alphas{0.3, 0.4, 0.47, 0.5, 0.53, 0.6, 0.7};
  std::vector<int> ablation_strides{60, 40, 20, 10};
  int ablation_traj = 10;
  int baseline_traj = 0;  // 0 = match prism's final budget
  int baseline_stride = 20;
  int trace_m = 20;

  void validate() const;  // throws ConfigError
};

// Flat dotted-key "key = value" file. '#' starts a comment. Unknown keys are
// rejected with a diagnostic naming the key.
ExperimentConfig parse_config(const std::string& path);

// applies one key/value pair (shared by the file parser and flag overrides)
void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// canonical resolved snapshot: every key, one per line, sorted
std::string resolved_text(const ExperimentConfig& cfg);

// FNV-1a hash of the resolved snapshot, as a hex string
std::string config_fingerprint(const ExperimentConfig& cfg);

}  // namespace prism

#endif
