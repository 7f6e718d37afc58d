#pragma once

#include <functional>
#include <map>

#include "mismc/allocation.hpp"
#include "mismc/model.hpp"
#include "mismc/multi_index.hpp"
#include "mismc/smc.hpp"

namespace mismc {

struct EstimatorParams {
  SmcConfig smc;
  double z_min = 1e-12;  // lower clamp for the normalizer estimate
};

struct EstimateResult {
  double value = 0.0;
  double numerator = 0.0;
  double denominator_raw = 0.0;
  bool clamped = false;
  double total_cost = 0.0;
  std::map<MultiIndex, long, LexLess> populated;  // physical index -> N_alpha
};

// Ratio of one SMC run at a fixed physical index; discretization bias
// remains.
EstimateResult single_level_estimate(const ForwardModel& model,
                                     const MultiIndex& alpha_phys, int n_particles,
                                     const EstimatorParams& params, RngStream rng);

// Deterministic multi-index estimator over a downward-closed relative index
// set: independent SMC per index, increments summed, normalizer clamped at
// z_min. A 1-direction set gives the multilevel special case.
EstimateResult mismc_estimate(const ForwardModel& model, const IndexSet& set,
                              const std::map<MultiIndex, long, LexLess>& n_per_alpha,
                              const EstimatorParams& params, RngStream rng);

// Randomized multi-index estimator: index counts drawn from the allocation
// distribution (scaled multinomial), each populated index estimated with an
// independent SMC and reweighted by N_alpha / (N p_alpha).
EstimateResult rmismc_estimate(const ForwardModel& model,
                               const AllocationDistribution& dist, long n_total,
                               long n_min, const EstimatorParams& params,
                               RngStream rng);

// Standard sqrt(V/C)-proportional sample sizes over a relative index set,
// scaled so that sum N_alpha * cost_per_particle(alpha) is close to the
// budget, floored at n_floor and rounded up. Throws InfeasibleBudgetError
// when the floor alone exceeds the budget.
std::map<MultiIndex, long, LexLess> allocate_samples_deterministic(
    const IndexSet& set, const std::vector<double>& beta,
    const std::vector<double>& gamma, double budget, long n_floor,
    const std::function<double(const MultiIndex&)>& cost_per_particle);

}  // namespace mismc
