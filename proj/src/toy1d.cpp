#include "mismc/models/toy1d.hpp"

#include <cmath>

#include "mismc/errors.hpp"
#include "mismc/fem.hpp"
#include "mismc/quadrature.hpp"

namespace mismc {

namespace {
double reflect_into(double t, double lo, double hi) {
  const double span = hi - lo;
  double s = std::fmod(t - lo, 2.0 * span);
  if (s < 0.0) s += 2.0 * span;
  if (s > span) s = 2.0 * span - s;
  return lo + s;
}
}  // namespace

Toy1dModel::Toy1dModel(Toy1dConfig cfg) : cfg_(std::move(cfg)), gamma_{cfg_.gamma} {
  if (cfg_.start_level < 1)
    throw ConfigError("toy1d: start_level must be >= 1");
  if (cfg_.max_level < cfg_.start_level)
    throw ConfigError("toy1d: max_level must be >= start_level");
  if (!(cfg_.noise_sd > 0.0)) throw ConfigError("toy1d: noise_sd must be > 0");
  if (cfg_.data.size() != cfg_.obs_points.size())
    throw ConfigError("toy1d: data length must match obs_points");
  inv_var_ = 1.0 / (cfg_.noise_sd * cfg_.noise_sd);

  const std::size_t n_obs = cfg_.obs_points.size();
  response_.resize(static_cast<std::size_t>(cfg_.max_level) + 1);
  response_[0].assign(n_obs, 0.0);  // level 0: one cell, zero interior solution
  for (int l = 1; l <= cfg_.max_level; ++l) {
    const int cells = 1 << l;
    const auto u = fem_solve_1d(l, [](double) { return 1.0; },
                                [](double) { return 1.0; });
    auto& resp = response_[static_cast<std::size_t>(l)];
    resp.resize(n_obs);
    for (std::size_t i = 0; i < n_obs; ++i)
      resp[i] = interp_nodal_1d(u, cells, cfg_.obs_points[i]);
  }
  exact_response_.resize(n_obs);
  for (std::size_t i = 0; i < n_obs; ++i)
    exact_response_[i] = exact_observation(1.0, cfg_.obs_points[i]);
}

double Toy1dModel::log_likelihood(double x, int level) const {
  const std::vector<double>* resp = nullptr;
  if (level < 0) {
    resp = &exact_response_;
  } else {
    if (level > cfg_.max_level)
      throw EvaluationError("toy1d: level beyond cached maximum");
    resp = &response_[static_cast<std::size_t>(level)];
  }
  double s = 0.0;
  for (std::size_t i = 0; i < resp->size(); ++i) {
    const double r = cfg_.data[i] - x * (*resp)[i];
    s += r * r;
  }
  return -0.5 * inv_var_ * s;
}

State Toy1dModel::sample_prior(const MultiIndex& alpha_phys, RngStream& rng) const {
  return State{alpha_phys, {2.0 * rng.uniform01() - 1.0}};
}

Evaluation Toy1dModel::evaluate(const MultiIndex& alpha_phys, const State& x) const {
  const double v = x.value[0];
  return Evaluation{log_likelihood(v, alpha_phys[0]), v * v};
}

State Toy1dModel::propose(const State& x, double step, RngStream& rng) const {
  State out = x;
  out.value[0] = reflect_into(x.value[0] + step * rng.normal(), -1.0, 1.0);
  return out;
}

std::vector<double> Toy1dModel::synthesize_data(double x_star, double noise_sd,
                                                const std::vector<double>& obs_points,
                                                RngStream& rng) {
  std::vector<double> y(obs_points.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = exact_observation(x_star, obs_points[i]) + noise_sd * rng.normal();
  return y;
}

double Toy1dModel::unnormalized_integral(int zeta_power, int level,
                                         int quad_nodes) const {
  const QuadratureRule rule = gauss_legendre(quad_nodes);
  const double val = integrate(rule, [&](double x) {
    return std::pow(x, zeta_power) * std::exp(log_likelihood(x, level));
  });
  return 0.5 * val;  // prior density 1/2 on [-1,1]
}

double Toy1dModel::unnormalized_integral_trapezoid(int zeta_power, int level,
                                                   int nodes) const {
  const QuadratureRule rule = trapezoid(nodes, -1.0, 1.0);
  const double val = integrate(rule, [&](double x) {
    return std::pow(x, zeta_power) * std::exp(log_likelihood(x, level));
  });
  return 0.5 * val;
}

double Toy1dModel::posterior_quadrature(int zeta_power, int level,
                                        int quad_nodes) const {
  return unnormalized_integral(zeta_power, level, quad_nodes) /
         unnormalized_integral(0, level, quad_nodes);
}

}  // namespace mismc
