#include "mismc/smc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "mismc/errors.hpp"
#include "mismc/parallel.hpp"

namespace mismc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Seed-derivation tags inside one run; separate layers keep initialization,
// resampling and mutation streams disjoint.
constexpr std::uint64_t kTagInit = 0;
constexpr std::uint64_t kTagResample = 1;
constexpr std::uint64_t kTagMutate = 2;

double log_mean_exp(const std::vector<double>& v, double* max_out) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (max_out) *max_out = m;
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s / static_cast<double>(v.size()));
}

}  // namespace

TemperingSchedule TemperingSchedule::linear(int n_stages) {
  if (n_stages < 2) throw ConfigError("tempering schedule needs >= 2 stages");
  TemperingSchedule s;
  s.taus.resize(static_cast<std::size_t>(n_stages));
  for (int j = 0; j < n_stages; ++j)
    s.taus[static_cast<std::size_t>(j)] =
        static_cast<double>(j) / static_cast<double>(n_stages - 1);
  s.taus.front() = 0.0;
  s.taus.back() = 1.0;
  return s;
}

void TemperingSchedule::validate() const {
  if (taus.size() < 2) throw ConfigError("tempering schedule needs >= 2 stages");
  if (taus.front() != 0.0 || taus.back() != 1.0)
    throw ConfigError("tempering schedule must start at 0 and end at 1");
  for (std::size_t j = 1; j < taus.size(); ++j) {
    if (!(taus[j] > taus[j - 1]))
      throw ConfigError("tempering schedule must be strictly increasing");
  }
}

std::vector<ExpansionTerm> increment_terms(const ForwardModel& model,
                                           const MultiIndex& alpha_rel) {
  if (alpha_rel.dim() != model.index_dim())
    throw DomainError("increment_terms: index dimension mismatch");
  std::vector<ExpansionTerm> terms;
  for (const SignedSubIndex& s : subindex_expansion(alpha_rel))
    terms.push_back(ExpansionTerm{model.to_physical(s.index), s.sign});
  return terms;
}

std::vector<ExpansionTerm> single_level_terms(const MultiIndex& alpha_phys) {
  return {ExpansionTerm{alpha_phys, 1}};
}

std::pair<double, std::vector<double>> coupled_log_likelihood(
    const ForwardModel& model, const std::vector<ExpansionTerm>& terms,
    const State& x) {
  const ParticleCache c = coupled_evaluate(model, terms, x);
  return {c.log_lik_max, c.log_lik};
}

ParticleCache coupled_evaluate(const ForwardModel& model,
                               const std::vector<ExpansionTerm>& terms,
                               const State& x) {
  ParticleCache c;
  c.log_lik.resize(terms.size());
  c.qoi.resize(terms.size());
  c.log_lik_max = kNegInf;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const Evaluation e = model.evaluate(terms[k].index, x);
    c.log_lik[k] = e.log_lik;
    c.qoi[k] = e.qoi;
    c.log_lik_max = std::max(c.log_lik_max, e.log_lik);
  }
  return c;
}

double psi_evaluate(const std::vector<ExpansionTerm>& terms,
                    const std::vector<double>& per_term_log_lik,
                    const std::vector<double>& per_term_zeta) {
  assert(terms.size() == per_term_log_lik.size());
  assert(terms.size() == per_term_zeta.size());
  double m = kNegInf;
  for (double v : per_term_log_lik) m = std::max(m, v);
  if (m == kNegInf) return 0.0;  // zero coupled likelihood carries no mass
  double s = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k)
    s += terms[k].sign * std::exp(per_term_log_lik[k] - m) * per_term_zeta[k];
  return s;
}

std::vector<int> resample_ancestors(const std::vector<double>& weights,
                                    ResamplingScheme scheme, RngStream& rng) {
  const int n = static_cast<int>(weights.size());
  if (n == 0) throw DomainError("resample: empty weight vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("resample: weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw DomainError("resample: all weights are zero");
  if (std::abs(sum - 1.0) > 1e-8)
    throw DomainError("resample: weights must be normalized");

  std::vector<double> cum(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;

  std::vector<int> ancestors(static_cast<std::size_t>(n));
  if (scheme == ResamplingScheme::Systematic) {
    const double u = rng.uniform01();
    int k = 0;
    for (int i = 0; i < n; ++i) {
      const double pos = (i + u) / n;
      while (cum[static_cast<std::size_t>(k)] < pos && k < n - 1) ++k;
      ancestors[static_cast<std::size_t>(i)] = k;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      const auto it = std::lower_bound(cum.begin(), cum.end(), u);
      ancestors[static_cast<std::size_t>(i)] =
          static_cast<int>(std::min<std::ptrdiff_t>(it - cum.begin(), n - 1));
    }
  }
  return ancestors;
}

double mutate(Population& pop, const ForwardModel& model,
              const std::vector<ExpansionTerm>& terms, double tau,
              const MutationConfig& mutation, RngStream stage_rng,
              double* cost_units) {
  const int n = pop.size();
  double cost_per_eval = 0.0;
  for (const auto& t : terms) cost_per_eval += model.cost(t.index);

  std::vector<int> accepted(static_cast<std::size_t>(n), 0);
  parallel_for(n, [&](std::int64_t i) {
    RngStream rng = stage_rng.child(static_cast<std::uint64_t>(i));
    State& state = pop.states[static_cast<std::size_t>(i)];
    ParticleCache& cache = pop.caches[static_cast<std::size_t>(i)];
    int acc = 0;
    for (int step = 0; step < mutation.n_steps; ++step) {
      State prop = model.propose(state, mutation.step_size, rng);
      ParticleCache prop_cache = coupled_evaluate(model, terms, prop);
      const double delta = tau * (prop_cache.log_lik_max - cache.log_lik_max);
      const double u = 1.0 - rng.uniform01();  // (0, 1]
      const bool take = delta >= 0.0 || std::log(u) < delta;
      if (take) {
        state = std::move(prop);
        cache = std::move(prop_cache);
        ++acc;
      }
    }
    accepted[static_cast<std::size_t>(i)] = acc;
  });
  if (cost_units)
    *cost_units += static_cast<double>(n) * mutation.n_steps * cost_per_eval;

  long total_accepted = 0;
  for (int a : accepted) total_accepted += a;
  const long total_steps = static_cast<long>(n) * std::max(1, mutation.n_steps);
  return static_cast<double>(total_accepted) / static_cast<double>(total_steps);
}

namespace {

void resample_population(Population& pop, const std::vector<double>& w,
                         const SmcConfig& cfg, int stage_index, RngStream& rng) {
  const int n = pop.size();
  RngStream resample_rng =
      rng.child({kTagResample, static_cast<std::uint64_t>(stage_index)});
  const std::vector<int> ancestors =
      resample_ancestors(w, cfg.resampling, resample_rng);
  Population next;
  next.states.resize(static_cast<std::size_t>(n));
  next.caches.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    next.states[static_cast<std::size_t>(i)] =
        pop.states[static_cast<std::size_t>(ancestors[static_cast<std::size_t>(i)])];
    next.caches[static_cast<std::size_t>(i)] =
        pop.caches[static_cast<std::size_t>(ancestors[static_cast<std::size_t>(i)])];
  }
  pop = std::move(next);
}

// One reweight/resample/mutate transition; log_w carries persistent weights
// (all zero whenever every stage resamples). Returns the stage diagnostics.
StageDiagnostics smc_transition(Population& pop, const ForwardModel& model,
                                const std::vector<ExpansionTerm>& terms,
                                double tau_prev, double tau_next, int stage_index,
                                const SmcConfig& cfg, const MultiIndex& alpha_label,
                                RngStream& rng, double* log_z,
                                std::vector<double>* log_w, double* cost_units) {
  const int n = pop.size();
  const double dtau = tau_next - tau_prev;
  std::vector<double> log_h(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    log_h[static_cast<std::size_t>(i)] =
        dtau * pop.caches[static_cast<std::size_t>(i)].log_lik_max;

  if (cfg.audit_bounds) {
    for (double lh : log_h) {
      if (std::isnan(lh) || lh > cfg.audit_log_bound ||
          (std::isfinite(lh) && lh < -cfg.audit_log_bound))
        throw EvaluationError("stage ratio audit failed at " + alpha_label.to_string());
    }
  }

  const bool always_resample = cfg.resample_ess_fraction >= 1.0;
  double ess = 0.0;
  if (always_resample) {
    double max_log_h = kNegInf;
    const double stage_log_mean = log_mean_exp(log_h, &max_log_h);
    if (stage_log_mean == kNegInf)
      throw DegeneratePopulationError(
          "all particle weights vanished at stage " + std::to_string(stage_index) +
              " for index " + alpha_label.to_string(),
          alpha_label.to_string(), stage_index);
    *log_z += stage_log_mean;

    std::vector<double> w(static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(i)] =
          std::exp(log_h[static_cast<std::size_t>(i)] - max_log_h);
      wsum += w[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(i)] /= wsum;
      ess += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
    }
    ess = 1.0 / ess;
    resample_population(pop, w, cfg, stage_index, rng);
  } else {
    // Persistent weights: Z_j = Z_{j-1} * sum_i W_i H_i with W normalized.
    auto log_sum_exp = [](const std::vector<double>& v) {
      double m = kNegInf;
      for (double x : v) m = std::max(m, x);
      if (m == kNegInf) return kNegInf;
      double s = 0.0;
      for (double x : v) s += std::exp(x - m);
      return m + std::log(s);
    };
    const double lse_prev = log_sum_exp(*log_w);
    for (int i = 0; i < n; ++i)
      (*log_w)[static_cast<std::size_t>(i)] += log_h[static_cast<std::size_t>(i)];
    const double lse_next = log_sum_exp(*log_w);
    if (lse_next == kNegInf)
      throw DegeneratePopulationError(
          "all particle weights vanished at stage " + std::to_string(stage_index) +
              " for index " + alpha_label.to_string(),
          alpha_label.to_string(), stage_index);
    *log_z += lse_next - lse_prev;

    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      w[static_cast<std::size_t>(i)] =
          std::exp((*log_w)[static_cast<std::size_t>(i)] - lse_next);
    for (double wi : w) ess += wi * wi;
    ess = 1.0 / ess;
    if (ess < cfg.resample_ess_fraction * n) {
      double wsum = 0.0;
      for (double wi : w) wsum += wi;
      for (double& wi : w) wi /= wsum;
      resample_population(pop, w, cfg, stage_index, rng);
      std::fill(log_w->begin(), log_w->end(), 0.0);
    }
  }

  const double acc = mutate(
      pop, model, terms, tau_next, cfg.mutation,
      rng.child({kTagMutate, static_cast<std::uint64_t>(stage_index)}), cost_units);

  StageDiagnostics d;
  d.tau = tau_next;
  d.ess = ess;
  d.acceptance = acc;
  d.log_z = *log_z;
  return d;
}

// Next inverse temperature for the adaptive schedule: largest step whose
// incremental-weight ESS stays above the target fraction.
double adaptive_next_tau(const Population& pop, double tau_prev, double target_ess,
                         int n) {
  auto ess_at = [&](double dtau) {
    double m = kNegInf;
    for (const auto& c : pop.caches) m = std::max(m, dtau * c.log_lik_max);
    if (m == kNegInf) return 0.0;
    double s1 = 0.0, s2 = 0.0;
    for (const auto& c : pop.caches) {
      const double w = std::exp(dtau * c.log_lik_max - m);
      s1 += w;
      s2 += w * w;
    }
    return s1 * s1 / s2;
  };
  const double full = 1.0 - tau_prev;
  if (ess_at(full) >= target_ess * n) return 1.0;
  double lo = 0.0, hi = full;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ess_at(mid) >= target_ess * n)
      lo = mid;
    else
      hi = mid;
  }
  const double dtau = std::max(lo, 1e-6 * full);
  return tau_prev + dtau;
}

}  // namespace

IncrementEstimate run_smc(const ForwardModel& model,
                          const std::vector<ExpansionTerm>& terms,
                          int n_particles, const SmcConfig& cfg, RngStream rng) {
  if (terms.empty()) throw DomainError("run_smc: empty expansion");
  if (n_particles < 2) throw DomainError("run_smc: need at least 2 particles");
  cfg.schedule.validate();

  const MultiIndex alpha = terms.front().index;
  double cost_per_eval = 0.0;
  for (const auto& t : terms) cost_per_eval += model.cost(t.index);

  Population pop;
  pop.states.resize(static_cast<std::size_t>(n_particles));
  pop.caches.resize(static_cast<std::size_t>(n_particles));
  parallel_for(n_particles, [&](std::int64_t i) {
    RngStream init = rng.child({kTagInit, static_cast<std::uint64_t>(i)});
    pop.states[static_cast<std::size_t>(i)] = model.sample_prior(alpha, init);
    pop.caches[static_cast<std::size_t>(i)] =
        coupled_evaluate(model, terms, pop.states[static_cast<std::size_t>(i)]);
  });

  IncrementEstimate est;
  est.alpha = alpha;
  est.n_particles = n_particles;
  est.cost = static_cast<double>(n_particles) * cost_per_eval;

  double log_z = 0.0;
  std::vector<double> log_w(static_cast<std::size_t>(n_particles), 0.0);
  if (cfg.adaptive_schedule) {
    double tau = 0.0;
    int stage = 1;
    constexpr int kMaxStages = 10000;
    while (tau < 1.0 && stage < kMaxStages) {
      const double tau_next =
          adaptive_next_tau(pop, tau, cfg.adaptive_ess_fraction, n_particles);
      est.stages.push_back(smc_transition(pop, model, terms, tau, tau_next, stage,
                                          cfg, alpha, rng, &log_z, &log_w,
                                          &est.cost));
      tau = tau_next;
      ++stage;
    }
    if (tau < 1.0)
      throw NumericalError("adaptive tempering did not reach tau = 1");
  } else {
    const auto& taus = cfg.schedule.taus;
    for (std::size_t j = 1; j < taus.size(); ++j) {
      est.stages.push_back(smc_transition(pop, model, terms, taus[j - 1], taus[j],
                                          static_cast<int>(j), cfg, alpha, rng,
                                          &log_z, &log_w, &est.cost));
    }
  }

  est.log_z = log_z;
  est.z_hat = std::exp(log_z);

  std::vector<double> ones(terms.size(), 1.0);
  if (cfg.resample_ess_fraction >= 1.0) {
    double sum_phi = 0.0, sum_one = 0.0;
    for (int i = 0; i < n_particles; ++i) {
      const ParticleCache& c = pop.caches[static_cast<std::size_t>(i)];
      sum_phi += psi_evaluate(terms, c.log_lik, c.qoi);
      sum_one += psi_evaluate(terms, c.log_lik, ones);
    }
    est.f_phi = est.z_hat * sum_phi / n_particles;
    est.f_one = est.z_hat * sum_one / n_particles;
  } else {
    // Weighted final population when resampling was ESS-triggered.
    double m = kNegInf;
    for (double lw : log_w) m = std::max(m, lw);
    double wsum = 0.0, sum_phi = 0.0, sum_one = 0.0;
    for (int i = 0; i < n_particles; ++i) {
      const double w = std::exp(log_w[static_cast<std::size_t>(i)] - m);
      const ParticleCache& c = pop.caches[static_cast<std::size_t>(i)];
      sum_phi += w * psi_evaluate(terms, c.log_lik, c.qoi);
      sum_one += w * psi_evaluate(terms, c.log_lik, ones);
      wsum += w;
    }
    est.f_phi = est.z_hat * sum_phi / wsum;
    est.f_one = est.z_hat * sum_one / wsum;
  }
  return est;
}

IncrementEstimate run_increment_smc(const ForwardModel& model,
                                    const MultiIndex& alpha_rel, int n_particles,
                                    const SmcConfig& cfg, RngStream rng) {
  return run_smc(model, increment_terms(model, alpha_rel), n_particles, cfg, rng);
}

IncrementEstimate run_single_level_smc(const ForwardModel& model,
                                       const MultiIndex& alpha_phys, int n_particles,
                                       const SmcConfig& cfg, RngStream rng) {
  return run_smc(model, single_level_terms(alpha_phys), n_particles, cfg, rng);
}

}  // namespace mismc
