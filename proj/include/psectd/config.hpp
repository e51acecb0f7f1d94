#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace psectd {

enum class ExperimentKind {
  DataEfficiency,
  CeeConvergence,
  StochasticitySweep,
  OffPolicy,
  LstdCompare,
};

const char* to_string(ExperimentKind kind);

/// Parsed from a flat key = value document (see parse_experiment_config).
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::DataEfficiency;

  // environment
  double slip_p = 1.0;
  double discount = 1.0;
  int max_steps = 1000;

  // policies
  std::string policy_mode = "on-policy";  // on-policy | off-policy
  std::uint64_t policy_seed = 1234;

  // protocol
  std::vector<int> batch_sizes;
  int trials = 50;
  std::uint64_t base_seed = 0;
  std::vector<std::string> algorithms;

  // learner settings
  double alpha = 0.05;
  double delta = 1e-10;
  long max_presentations = 1000000;
  std::vector<double> alpha_grid;  // non-empty: sweep, select min mean MSVE

  // lstd settings
  double lstd_epsilon = 1e-6;
  bool lstd_weight_reward = false;
  std::string lstd_placement = "update";  // update | target
  std::vector<double> epsilon_grid;

  // stochasticity sweep
  std::vector<double> slip_grid;

  std::string out_dir = "out";
};

/// Flat key = value lines; '#' starts a comment; lists in [a, b, c]. Unknown
/// keys are hard errors (ConfigError), as are malformed values and
/// kind-specific omissions (empty grids where the kind needs one).
ExperimentConfig parse_experiment_config(std::istream& is);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace psectd
