#pragma once

#include <vector>

#include "mismc/model.hpp"

namespace mismc {

// 1D elliptic toy problem on [0,1]: -u'' = x with zero boundary, scalar
// parameter x ~ U[-1,1], observations of u at fixed points with Gaussian
// noise, quantity of interest x^2. The solution is linear in x, so each
// level caches the unit-forcing FEM response at the observation points and
// a likelihood evaluation is a handful of flops.
struct Toy1dConfig {
  int start_level = 1;          // physical level of estimator-relative 0
  int max_level = 16;           // finest cached FEM level
  double noise_sd = 0.2;
  std::vector<double> obs_points = {0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> data;     // same length as obs_points
  double gamma = 1.0;           // cost exponent (tridiagonal solve is O(K))
};

class Toy1dModel final : public ForwardModel {
 public:
  explicit Toy1dModel(Toy1dConfig cfg);

  std::string name() const override { return "toy1d"; }
  int index_dim() const override { return 1; }
  MultiIndex start_index() const override { return MultiIndex{cfg_.start_level}; }
  const std::vector<double>& cost_exponents() const override { return gamma_; }

  State sample_prior(const MultiIndex& alpha_phys, RngStream& rng) const override;
  Evaluation evaluate(const MultiIndex& alpha_phys, const State& x) const override;
  State propose(const State& x, double step, RngStream& rng) const override;
  double qoi_bound() const override { return 1.0; }

  const Toy1dConfig& config() const { return cfg_; }

  // Log-likelihood of parameter x at a level; level -1 uses the analytic
  // solution u(z; x) = -x (z^2 - z) / 2.
  double log_likelihood(double x, int level) const;

  // Exact data-generation rule (no noise): observation of u at z.
  static double exact_observation(double x_star, double z) {
    return -0.5 * x_star * (z * z - z);
  }
  static std::vector<double> synthesize_data(double x_star, double noise_sd,
                                             const std::vector<double>& obs_points,
                                             RngStream& rng);

  // Deterministic quadrature oracles over the prior. zeta_power selects the
  // integrand x^zeta_power * L_level(x); level -1 means analytic.
  double unnormalized_integral(int zeta_power, int level, int quad_nodes = 200) const;
  double unnormalized_integral_trapezoid(int zeta_power, int level, int nodes) const;
  // Posterior expectation of x^zeta_power at a level (ratio of the above).
  double posterior_quadrature(int zeta_power, int level, int quad_nodes = 200) const;

 private:
  Toy1dConfig cfg_;
  std::vector<double> gamma_;
  // response_[l][i]: FEM solution for unit forcing at obs point i, level l.
  std::vector<std::vector<double>> response_;
  std::vector<double> exact_response_;
  double inv_var_ = 0.0;
};

}  // namespace mismc
