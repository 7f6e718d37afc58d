#pragma once

#include <utility>
#include <vector>

#include "mismc/model.hpp"
#include "mismc/multi_index.hpp"
#include "mismc/rng.hpp"

namespace mismc {

struct TemperingSchedule {
  std::vector<double> taus;  // 0 = tau_1 < ... < tau_J = 1

  static TemperingSchedule linear(int n_stages);
  void validate() const;
  int stages() const { return static_cast<int>(taus.size()); }
};

struct MutationConfig {
  int n_steps = 2;
  double step_size = 0.5;
};

enum class ResamplingScheme { Systematic, Multinomial };

struct SmcConfig {
  TemperingSchedule schedule = TemperingSchedule::linear(6);
  MutationConfig mutation;
  ResamplingScheme resampling = ResamplingScheme::Systematic;
  // Resample whenever the weight ESS drops below this fraction of N; the
  // default 1.0 resamples at every stage. Lower values keep persistent
  // weights between stages.
  double resample_ess_fraction = 1.0;
  // ESS-driven bisection schedule; adaptivity trades the exact-unbiasedness
  // guarantee for robustness, so it is off by default.
  bool adaptive_schedule = false;
  double adaptive_ess_fraction = 0.5;
  // When set, every stage verifies the incremental ratios stay finite and
  // within exp(+-audit_log_bound).
  bool audit_bounds = false;
  double audit_log_bound = 700.0;
};

// One term L_{alpha_k} of a coupled target, at a physical index.
struct ExpansionTerm {
  MultiIndex index;
  int sign = 1;
};

// Mixed-difference terms for an estimator-relative index (boundary rule
// applies at the model's starting level).
std::vector<ExpansionTerm> increment_terms(const ForwardModel& model,
                                           const MultiIndex& alpha_rel);
// Plain single-term target at a physical index (no differencing).
std::vector<ExpansionTerm> single_level_terms(const MultiIndex& alpha_phys);

// Per-particle cache of the coupled evaluation: log L and the quantity of
// interest at every expansion term, plus the running max.
struct ParticleCache {
  std::vector<double> log_lik;
  std::vector<double> qoi;
  double log_lik_max = 0.0;
};

struct Population {
  std::vector<State> states;
  std::vector<ParticleCache> caches;
  int size() const { return static_cast<int>(states.size()); }
};

struct StageDiagnostics {
  double tau = 0.0;         // inverse temperature reached after the stage
  double ess = 0.0;         // of the incremental weights
  double acceptance = 0.0;  // mutation acceptance rate
  double log_z = 0.0;       // running log normalizer
};

struct IncrementEstimate {
  MultiIndex alpha;       // finest physical index of the increment
  double f_phi = 0.0;     // unnormalized estimate with zeta = qoi
  double f_one = 0.0;     // unnormalized estimate with zeta = 1
  double z_hat = 0.0;
  double log_z = 0.0;
  int n_particles = 0;
  double cost = 0.0;      // abstract model-evaluation cost units
  std::vector<StageDiagnostics> stages;
};

// Evaluates all expansion terms at one state; returns (max log L, per-term
// log L). Also available through coupled_evaluate, which keeps the QoIs.
std::pair<double, std::vector<double>> coupled_log_likelihood(
    const ForwardModel& model, const std::vector<ExpansionTerm>& terms,
    const State& x);

ParticleCache coupled_evaluate(const ForwardModel& model,
                               const std::vector<ExpansionTerm>& terms,
                               const State& x);

// Signed, weight-corrected combination sum_k sign_k w_k zeta_k with
// w_k = exp(log_lik[k] - max_k log_lik). Weights live in (0, 1].
double psi_evaluate(const std::vector<ExpansionTerm>& terms,
                    const std::vector<double>& per_term_log_lik,
                    const std::vector<double>& per_term_zeta);

// Ancestor indices for normalized weights; expected multiplicity N w_i for
// both schemes.
std::vector<int> resample_ancestors(const std::vector<double>& weights,
                                    ResamplingScheme scheme, RngStream& rng);

// n_steps Metropolis-Hastings sweeps per particle, invariant for the
// tempered coupled target at inverse temperature tau. Returns the acceptance
// rate; adds the evaluation cost to *cost_units.
double mutate(Population& pop, const ForwardModel& model,
              const std::vector<ExpansionTerm>& terms, double tau,
              const MutationConfig& mutation, RngStream stage_rng,
              double* cost_units);

IncrementEstimate run_smc(const ForwardModel& model,
                          const std::vector<ExpansionTerm>& terms,
                          int n_particles, const SmcConfig& cfg, RngStream rng);

IncrementEstimate run_increment_smc(const ForwardModel& model,
                                    const MultiIndex& alpha_rel, int n_particles,
                                    const SmcConfig& cfg, RngStream rng);

IncrementEstimate run_single_level_smc(const ForwardModel& model,
                                       const MultiIndex& alpha_phys, int n_particles,
                                       const SmcConfig& cfg, RngStream rng);

}  // namespace mismc
