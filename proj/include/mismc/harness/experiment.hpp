#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mismc/harness/config.hpp"
#include "mismc/harness/reference.hpp"

namespace mismc {

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 0;          // 0 = leave runtime default
  std::string format = "csv";
};

struct ExperimentRecord {
  std::string method;
  double budget = 0.0;
  int realization = 0;
  double estimate = 0.0;
  double squared_error = 0.0;
  double cost = 0.0;
  bool clamped = false;
  bool failed = false;
  std::string error;
  double wall_seconds = 0.0;
};

struct RunResult {
  std::vector<ExperimentRecord> records;
  ReferenceValue reference;
  double z_min = 0.0;
  int n_failed = 0;
  std::vector<std::string> warnings;
};

// Full experiment: reference, budget-to-parameter mapping, realization farm,
// records/summary/plot emission. Throws NumericalError (after writing all
// outputs) when more than 5% of realizations fail.
RunResult run_experiment(ExperimentConfig cfg, const RunOverrides& ov);

// Appendix-style sweep fitting; emits increment statistics and the fitted
// (s, beta, gamma) record consumed by allocation construction.
void run_rates_command(ExperimentConfig cfg, const RunOverrides& ov);

// Computes and caches the reference value for a config.
void run_reference_command(ExperimentConfig cfg, const RunOverrides& ov);

// Synthesizes observations / point patterns and writes them to the output
// directory.
void run_simulate_data(ExperimentConfig cfg, const RunOverrides& ov);

}  // namespace mismc
