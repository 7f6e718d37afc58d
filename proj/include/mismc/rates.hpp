#pragma once

#include <vector>

#include "mismc/model.hpp"
#include "mismc/multi_index.hpp"
#include "mismc/smc.hpp"

namespace mismc {

struct RatePoint {
  double level = 0.0;
  double value = 0.0;  // must be > 0
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

// Ordinary least squares of log2(value) against level.
RateFit fit_rate(const std::vector<RatePoint>& points);

// fit_rate with the pre-asymptotic drop rule: while R^2 < 0.9 and at least
// three points remain, drop the leading point. Both fits are reported.
struct TrimmedRateFit {
  RateFit full;
  RateFit used;
  int dropped = 0;
};
TrimmedRateFit fit_rate_trimmed(const std::vector<RatePoint>& points);

struct MseCostRecord {
  double target_cost = 0.0;   // budget-ladder label used for grouping
  double cost = 0.0;          // realized abstract cost
  double squared_error = 0.0;
};

// Groups records by target cost, averages squared errors into per-budget
// MSEs, and regresses log(MSE) on log(mean realized cost).
RateFit fit_mse_cost(const std::vector<MseCostRecord>& records);

// ---------------------------------------------------------------------------
// Increment-statistics sweeps
// ---------------------------------------------------------------------------

enum class IncrementRateMethod {
  PriorMonteCarlo,  // direct prior sampling of the mixed difference
  Smc,              // replicate SMC increment runs
};

struct SweepConfig {
  int direction = 0;            // swept direction; -1 sweeps the diagonal
  int level_lo = 1;             // physical level range (inclusive)
  int level_hi = 4;
  MultiIndex base;              // fixed components (physical); defaults to start
  int replications = 20;
  int samples = 1000;           // prior draws (or particles) per replication
  IncrementRateMethod method = IncrementRateMethod::PriorMonteCarlo;
  bool use_qoi = true;          // zeta = qoi; otherwise zeta = 1
  SmcConfig smc;                // for the Smc method
};

struct IncrementStatistics {
  MultiIndex alpha;         // physical index of the increment
  double level_scalar = 0;  // abscissa used in the fits
  double mean = 0.0;        // sample mean of the increment
  double second_moment = 0.0;
  double variance = 0.0;
  long n_samples = 0;
  int replications = 0;
};

struct SweepResult {
  std::vector<IncrementStatistics> stats;
  TrimmedRateFit weak;    // log2|mean|
  TrimmedRateFit strong;  // log2(second moment); the V_alpha audit
};

// Full mixed-difference terms at a physical index (subtracts one unit in
// every direction); throws if any term would fall below model.min_index().
std::vector<ExpansionTerm> mixed_difference_terms(const ForwardModel& model,
                                                  const MultiIndex& alpha_phys);

// Replicated estimates of the mean and second moment of Delta(L ζ) along a
// one-direction (or diagonal) sweep, with rate fits.
SweepResult estimate_increment_rates(const ForwardModel& model,
                                     const SweepConfig& cfg, RngStream rng);

}  // namespace mismc
