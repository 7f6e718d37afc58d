#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mismc/multi_index.hpp"
#include "mismc/rng.hpp"

namespace mismc {

// Latent state of one particle. For finite-dimensional parameter models the
// vector holds the parameters directly; for spectral-field models it packs
// the standard complex-normal coefficients of the finest resolution the
// state was sampled for, recorded in `alpha` so coarser evaluations can
// truncate consistently.
struct State {
  MultiIndex alpha;
  std::vector<double> value;
};

struct Evaluation {
  double log_lik = 0.0;
  double qoi = 0.0;
};

// A forward-model family indexed by resolution. Implementations are
// immutable after construction and reentrant: evaluate/propose may be called
// from many threads at once.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual std::string name() const = 0;
  // Number of resolution directions D.
  virtual int index_dim() const = 0;
  // Physical starting level; estimator-relative index (0,...,0) maps here.
  virtual MultiIndex start_index() const = 0;
  // Per-direction cost exponents gamma_i.
  virtual const std::vector<double>& cost_exponents() const = 0;

  // Abstract cost units for one evaluation at a physical index:
  // prod_i 2^(alpha_i * gamma_i).
  virtual double cost(const MultiIndex& alpha_phys) const;

  // Draws from the prior at the given physical resolution.
  virtual State sample_prior(const MultiIndex& alpha_phys, RngStream& rng) const = 0;

  // Log-likelihood and quantity of interest at a physical resolution.
  // For spectral-field states requires alpha_phys <= state.alpha.
  virtual Evaluation evaluate(const MultiIndex& alpha_phys, const State& x) const = 0;

  // Prior-reversible proposal (random walk with boundary reflection for
  // box-uniform priors, autoregressive prior mixing for Gaussian priors), so
  // Metropolis acceptance reduces to the tempered likelihood ratio.
  virtual State propose(const State& x, double step, RngStream& rng) const = 0;

  // Upper bound on |qoi| when the model's quantity of interest is bounded;
  // <= 0 means unbounded/unknown. Used only by optional runtime audits.
  virtual double qoi_bound() const { return 0.0; }

  // Physical level below which the model cannot be evaluated (mixed
  // differences in rate sweeps may reach below start_index()).
  virtual MultiIndex min_index() const { return MultiIndex::zeros(index_dim()); }

  // Converts an estimator-relative index to a physical one.
  MultiIndex to_physical(const MultiIndex& alpha_rel) const {
    return start_index().plus(alpha_rel);
  }
};

}  // namespace mismc
