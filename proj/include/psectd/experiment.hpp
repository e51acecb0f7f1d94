#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psectd/config.hpp"

namespace psectd {

struct TrialRecord {
  std::string experiment;
  std::string algorithm;
  int batch_size = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double msve = 0.0;  // NaN when the fit diverged
  long presentations = 0;
  bool converged = false;
  double unvisited_fraction = 0.0;
  double wall_time_ms = 0.0;
};

struct AggregateRecord {
  std::string experiment;
  std::string algorithm;
  int batch_size = 0;
  int trials = 0;
  double mean_msve = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int divergent_count = 0;
};

/// One row per swept hyperparameter candidate per (algorithm, batch size).
struct SelectionRecord {
  std::string experiment;
  std::string algorithm;
  int batch_size = 0;
  double value = 0.0;  // the candidate alpha or epsilon
  double mean_msve = 0.0;
  int divergent_count = 0;
  bool selected = false;
};

/// Stochasticity sweep summary: mean-MSVE ratio of each algorithm to plain TD.
struct RatioRecord {
  std::string experiment;
  std::string algorithm;
  double slip_p = 0.0;
  double algorithm_mean = 0.0;
  double td_mean = 0.0;
  double ratio = 0.0;
};

struct ExperimentTables {
  std::vector<TrialRecord> trials;
  std::vector<AggregateRecord> aggregates;
  std::vector<SelectionRecord> selections;
  std::vector<RatioRecord> ratios;
};

/// Per-trial seed: every record is reconstructible from
/// (base_seed, batch_size, trial) alone.
std::uint64_t trial_seed(std::uint64_t base_seed, int batch_size, int trial);

/// Runs the configured study: for each (batch size, trial) cell, sample one
/// batch and fit every configured algorithm on it (paired comparisons), then
/// aggregate with 95% confidence intervals. Trials run on a worker pool
/// (PSECTD_WORKERS overrides the size); output is independent of scheduling.
/// Divergent fits are recorded (msve = NaN) and counted, never fatal.
ExperimentTables run_experiment(const ExperimentConfig& config);

/// Data-efficiency trial sets at a fixed batch size across the slip grid,
/// plus per-p MSVE ratios against plain TD.
ExperimentTables run_stochasticity_sweep(const ExperimentConfig& config);

void write_tables_csv(const ExperimentTables& tables, const std::string& dir);
std::vector<AggregateRecord> read_aggregates_csv(const std::string& path);

int worker_count();

}  // namespace psectd
