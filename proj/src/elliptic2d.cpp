#include "mismc/models/elliptic2d.hpp"

#include <cmath>

#include "mismc/errors.hpp"

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

double Elliptic2dModel::psi1(double z1, double z2) {
  return std::cos(3.0 * z1) * std::sin(3.0 * z2);
}

double Elliptic2dModel::psi2(double z1, double z2) {
  return std::cos(z1) * std::sin(z2);
}

Elliptic2dModel::Elliptic2dModel(Elliptic2dConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.start_index.dim() != 2)
    throw ConfigError("elliptic2d: start_index must be 2-dimensional");
  if (cfg_.start_index[0] < 1 || cfg_.start_index[1] < 1)
    throw ConfigError("elliptic2d: start_index components must be >= 1");
  if (!(cfg_.noise_sd > 0.0)) throw ConfigError("elliptic2d: noise_sd must be > 0");
  if (cfg_.gamma.size() != 2) throw ConfigError("elliptic2d: gamma needs 2 entries");
  if (cfg_.data.size() != cfg_.obs_points.size())
    throw ConfigError("elliptic2d: data length must match obs_points");
  inv_var_ = 1.0 / (cfg_.noise_sd * cfg_.noise_sd);
}

const Elliptic2dModel::LevelOps& Elliptic2dModel::level_ops(
    const MultiIndex& alpha_phys) const {
  if (alpha_phys[0] < 1 || alpha_phys[1] < 1)
    throw EvaluationError("elliptic2d: level below (1,1) has no interior nodes");
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(alpha_phys.components());
  if (it != cache_.end()) return *it->second;

  auto ops = std::make_unique<LevelOps>();
  ops->grid = Grid2d::at_level(alpha_phys);
  ops->a_const = assemble_stiffness_2d(
      ops->grid, [](double, double) { return 3.0; }, true);
  ops->a_mode1 = assemble_stiffness_2d(ops->grid, &psi1, false);
  ops->a_mode2 = assemble_stiffness_2d(ops->grid, &psi2, false);
  const double f = cfg_.forcing;
  ops->load = assemble_load_2d(ops->grid, [f](double, double) { return f; });
  ops->obs.reserve(cfg_.obs_points.size());
  for (const auto& p : cfg_.obs_points)
    ops->obs.push_back(interp_weights_2d(ops->grid, p[0], p[1]));
  const auto& ref = *ops;
  cache_.emplace(alpha_phys.components(), std::move(ops));
  return ref;
}

std::vector<double> Elliptic2dModel::observe(const MultiIndex& alpha_phys,
                                             double x1, double x2) const {
  const LevelOps& ops = level_ops(alpha_phys);
  // A(x) = A_const + x1 A_mode1 + x2 A_mode2; the three share one band layout.
  BandMatrix a(ops.grid.n, ops.grid.half_bandwidth());
  const std::size_t m = a.values().size();
  const double* c0 = ops.a_const.values().data();
  const double* c1 = ops.a_mode1.values().data();
  const double* c2 = ops.a_mode2.values().data();
  double* out = a.values().data();
  for (std::size_t i = 0; i < m; ++i) out[i] = c0[i] + x1 * c1[i] + x2 * c2[i];
  a.cholesky_in_place();
  const std::vector<double> u = a.solve(ops.load);
  std::vector<double> g(ops.obs.size());
  for (std::size_t k = 0; k < ops.obs.size(); ++k) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c)
      if (ops.obs[k].dofs[c] >= 0)
        s += ops.obs[k].w[c] * u[static_cast<std::size_t>(ops.obs[k].dofs[c])];
    g[k] = s;
  }
  return g;
}

double Elliptic2dModel::log_likelihood(const MultiIndex& alpha_phys,
                                       double x1, double x2) const {
  const std::vector<double> g = observe(alpha_phys, x1, x2);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = cfg_.data[i] - g[i];
    s += r * r;
  }
  return -0.5 * inv_var_ * s;
}

State Elliptic2dModel::sample_prior(const MultiIndex& alpha_phys,
                                    RngStream& rng) const {
  State s;
  s.alpha = alpha_phys;
  s.value = {2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0};
  return s;
}

Evaluation Elliptic2dModel::evaluate(const MultiIndex& alpha_phys,
                                     const State& x) const {
  const double x1 = x.value[0], x2 = x.value[1];
  return Evaluation{log_likelihood(alpha_phys, x1, x2), x1 * x1 + x2 * x2};
}

State Elliptic2dModel::propose(const State& x, double step, RngStream& rng) const {
  State out = x;
  out.value[0] = reflect_into(x.value[0] + step * rng.normal(), -1.0, 1.0);
  out.value[1] = reflect_into(x.value[1] + step * rng.normal(), -1.0, 1.0);
  return out;
}

std::vector<double> Elliptic2dModel::synthesize_data(
    const Elliptic2dConfig& cfg, const MultiIndex& data_level,
    const std::array<double, 2>& x_star, RngStream& rng) {
  const double f = cfg.forcing;
  const auto coef = [&](double z1, double z2) {
    return 3.0 + x_star[0] * psi1(z1, z2) + x_star[1] * psi2(z1, z2);
  };
  const Grid2d grid = Grid2d::at_level(data_level);
  const std::vector<double> u =
      fem_solve_2d(data_level, coef, [f](double, double) { return f; });
  std::vector<double> y(cfg.obs_points.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = interp_bilinear_2d(grid, u, cfg.obs_points[i][0], cfg.obs_points[i][1]) +
           cfg.noise_sd * rng.normal();
  return y;
}

}  // namespace mismc
