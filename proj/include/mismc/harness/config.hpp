#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mismc/model.hpp"
#include "mismc/multi_index.hpp"
#include "mismc/smc.hpp"

namespace mismc {

enum class ModelFamily { Toy1d, Elliptic2d, Lgc, Lgp };

struct SynthesizeConfig {
  std::uint64_t seed = 1;
  std::optional<double> x_star_1d;                 // toy1d truth
  std::optional<std::array<double, 2>> x_star_2d;  // elliptic2d truth
  std::vector<int> level;                          // synthesis resolution
  std::optional<std::vector<double>> theta;        // point-process truth field
  std::optional<double> beta_prior;
  int n_points = 0;                                // lgp target count
};

struct DataConfig {
  std::optional<std::vector<double>> values;  // toy1d / elliptic2d observations
  std::optional<std::string> file;            // point-pattern CSV
  std::optional<SynthesizeConfig> synthesize;
};

struct ModelConfig {
  ModelFamily family = ModelFamily::Toy1d;
  std::vector<int> start_index;  // defaults per family
  double noise_sd = -1.0;        // defaults per family
  std::vector<double> gamma;     // defaults per family
  // toy1d
  std::vector<double> obs_points_1d;
  int max_level = 16;
  // elliptic2d
  double forcing = 100.0;
  std::vector<std::array<double, 2>> obs_points_2d;
  // lgc / lgp
  std::vector<double> theta;  // (theta1, theta2, theta3)
  double beta_prior = 3.0;
  bool half_exponent_truncation = false;
  DataConfig data;
};

struct SmcBlockConfig {
  int n_stages = 6;
  int n_mcmc = 2;
  double step_size = 0.5;
  std::string resampling = "systematic";
  double resample_ess_fraction = 1.0;  // 1.0 = resample every stage
  bool adaptive = false;
  double adaptive_ess_fraction = 0.5;

  SmcConfig to_smc_config() const;
};

struct RatesBlock {
  std::vector<double> s;
  std::vector<double> beta;
  std::vector<double> gamma;
};

enum class EstimatorKind { SingleLevel, Mismc, Rmismc };

struct IndexSetConfig {
  std::string kind = "tensor_product";   // or "total_degree"
  std::vector<double> weights;           // total-degree weights
};

struct EstimatorBlock {
  std::string name;
  EstimatorKind kind = EstimatorKind::SingleLevel;
  IndexSetConfig index_set;  // mismc only
  long n_floor = 50;         // mismc allocation floor
  long n_min = 50;           // rmismc batch size
  int level_cap = 10;        // single_level / mismc max relative level
  double level_rule_offset = 0.0;
};

struct ZMinConfig {
  std::string mode = "pilot";  // "pilot" | "fixed"
  double scale = 1e-8;         // pilot multiplier
  double value = 1e-12;        // fixed value
  int pilot_particles = 200;
};

struct ReferenceConfig {
  std::string method;          // "quadrature" | "smc" (default per family)
  std::vector<int> level;      // physical index of the reference resolution
  int quad_nodes = 400;
  int particles = 20000;
  int seeds = 10;
};

struct SweepBlock {
  int direction = 0;  // -1 = diagonal
  int level_lo = 1;
  int level_hi = 4;
  std::vector<int> base;
  int replications = 20;
  int samples = 1000;
  std::string method = "prior_mc";  // or "smc"
  bool use_qoi = true;
};

struct OutputConfig {
  std::string dir = "out";
  bool svg = true;
};

struct ExperimentConfig {
  ModelConfig model;
  SmcBlockConfig smc;
  RatesBlock rates;
  std::vector<EstimatorBlock> estimators;
  std::vector<double> budgets;
  int realizations = 0;
  std::uint64_t seed = 1;
  ZMinConfig z_min;
  ReferenceConfig reference;
  std::vector<SweepBlock> sweeps;
  OutputConfig output;

  bool has_run_section = false;
  bool has_sweep_section = false;
};

// Parses a config file with a strict schema: unknown keys anywhere are
// ConfigErrors naming the offending path.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& origin);

// Validates cross-field feasibility for the requested use ("run", "rates",
// "reference", "simulate-data"); throws ConfigError with a description.
void validate_config(const ExperimentConfig& cfg, const std::string& use);

struct BuiltModel {
  std::shared_ptr<const ForwardModel> model;
  bool synthetic_data = false;
  std::string data_label;  // provenance description for outputs
};

// Instantiates the forward model, synthesizing data when configured to.
BuiltModel build_model(const ModelConfig& cfg);

}  // namespace mismc
