#include "mismc/harness/reference.hpp"

#include <cmath>

#include "mismc/errors.hpp"
#include "mismc/estimators.hpp"
#include "mismc/models/elliptic2d.hpp"
#include "mismc/models/toy1d.hpp"
#include "mismc/parallel.hpp"
#include "mismc/quadrature.hpp"

namespace mismc {

namespace {

ReferenceValue toy_quadrature_reference(const Toy1dModel& toy,
                                        const ReferenceConfig& cfg) {
  const int level = cfg.level.empty()
                        ? std::min(12, toy.config().max_level)
                        : cfg.level[0];
  const double num = toy.unnormalized_integral(2, level, cfg.quad_nodes);
  const double den = toy.unnormalized_integral(0, level, cfg.quad_nodes);
  const double value = num / den;

  // Independent route: trapezoid with doubled resolution until stable, then
  // require agreement with the Gauss value.
  double prev = 0.0, cur = 0.0;
  for (int n = 1024; n <= (1 << 20); n *= 2) {
    cur = toy.unnormalized_integral_trapezoid(2, level, n) /
          toy.unnormalized_integral_trapezoid(0, level, n);
    if (n > 1024 && std::abs(cur - prev) < 1e-10 * std::max(1.0, std::abs(cur)))
      break;
    prev = cur;
  }
  if (std::abs(cur - value) > 1e-8 * std::max(1.0, std::abs(value)))
    throw NumericalError("toy reference: quadrature routes disagree (" +
                         std::to_string(value) + " vs " + std::to_string(cur) + ")");
  ReferenceValue out;
  out.value = value;
  out.se = 0.0;
  out.method = "quadrature";
  out.detail = "toy1d Gauss-Legendre at level " + std::to_string(level) +
               ", trapezoid cross-check";
  return out;
}

ReferenceValue elliptic_quadrature_reference(const Elliptic2dModel& pde,
                                             const ReferenceConfig& cfg) {
  const MultiIndex level =
      cfg.level.empty() ? MultiIndex{6, 6} : MultiIndex(cfg.level);
  const int n = std::max(8, cfg.quad_nodes);
  const QuadratureRule rule = gauss_legendre(n);
  // Likelihood values on the tensor grid; one FEM solve per node pair.
  std::vector<double> log_lik(static_cast<std::size_t>(n) * n);
  parallel_for(static_cast<std::int64_t>(n) * n, [&](std::int64_t idx) {
    const int i = static_cast<int>(idx % n);
    const int j = static_cast<int>(idx / n);
    log_lik[static_cast<std::size_t>(idx)] =
        pde.log_likelihood(level, rule.nodes[static_cast<std::size_t>(i)],
                           rule.nodes[static_cast<std::size_t>(j)]);
  });
  double max_ll = -1e300;
  for (double v : log_lik) max_ll = std::max(max_ll, v);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x1 = rule.nodes[static_cast<std::size_t>(i)];
      const double x2 = rule.nodes[static_cast<std::size_t>(j)];
      const double w = rule.weights[static_cast<std::size_t>(i)] *
                       rule.weights[static_cast<std::size_t>(j)];
      const double lik =
          std::exp(log_lik[static_cast<std::size_t>(j) * n + i] - max_ll);
      num += w * lik * (x1 * x1 + x2 * x2);
      den += w * lik;
    }
  }
  ReferenceValue out;
  out.value = num / den;
  out.se = 0.0;
  out.method = "quadrature";
  out.detail = "elliptic2d tensor Gauss-Legendre " + std::to_string(n) + "^2 at " +
               level.to_string();
  return out;
}

ReferenceValue smc_reference(const ForwardModel& model, const ReferenceConfig& cfg,
                             const SmcConfig& smc, std::uint64_t seed) {
  const MultiIndex level = cfg.level.empty()
                               ? model.to_physical(MultiIndex::zeros(model.index_dim()))
                               : MultiIndex(cfg.level);
  const int n_seeds = cfg.seeds;
  std::vector<double> estimates(static_cast<std::size_t>(n_seeds));
  RngStream root(seed);
  parallel_for(n_seeds, [&](std::int64_t r) {
    EstimatorParams params;
    params.smc = smc;
    params.z_min = 1e-300;  // reference runs never clamp
    const EstimateResult est =
        single_level_estimate(model, level, cfg.particles, params,
                              root.child({static_cast<std::uint64_t>(r)}));
    estimates[static_cast<std::size_t>(r)] = est.value;
  });
  double mean = 0.0;
  for (double v : estimates) mean += v;
  mean /= n_seeds;
  double var = 0.0;
  for (double v : estimates) var += (v - mean) * (v - mean);
  var /= std::max(1, n_seeds - 1);

  ReferenceValue out;
  out.value = mean;
  out.se = std::sqrt(var / n_seeds);
  out.method = "smc";
  out.seeds = n_seeds;
  out.detail = "single-level SMC at " + level.to_string() + ", " +
               std::to_string(cfg.particles) + " particles x " +
               std::to_string(n_seeds) + " seeds";

  // Disjoint halves for the self-consistency check.
  const int half = n_seeds / 2;
  if (half >= 1 && n_seeds - half >= 1) {
    double m1 = 0.0, m2 = 0.0;
    for (int r = 0; r < half; ++r) m1 += estimates[static_cast<std::size_t>(r)];
    for (int r = half; r < n_seeds; ++r) m2 += estimates[static_cast<std::size_t>(r)];
    m1 /= half;
    m2 /= (n_seeds - half);
    double v1 = 0.0, v2 = 0.0;
    for (int r = 0; r < half; ++r)
      v1 += (estimates[static_cast<std::size_t>(r)] - m1) *
            (estimates[static_cast<std::size_t>(r)] - m1);
    for (int r = half; r < n_seeds; ++r)
      v2 += (estimates[static_cast<std::size_t>(r)] - m2) *
            (estimates[static_cast<std::size_t>(r)] - m2);
    v1 /= std::max(1, half - 1);
    v2 /= std::max(1, n_seeds - half - 1);
    out.half_delta = m1 - m2;
    out.half_se = std::sqrt(v1 / half + v2 / (n_seeds - half));
  }
  return out;
}

}  // namespace

ReferenceValue compute_reference(const ForwardModel& model,
                                 const ReferenceConfig& cfg,
                                 const SmcConfig& smc, std::uint64_t seed) {
  std::string method = cfg.method;
  if (method.empty())
    method = (model.name() == "toy1d") ? "quadrature" : "smc";

  if (method == "quadrature") {
    if (const auto* toy = dynamic_cast<const Toy1dModel*>(&model))
      return toy_quadrature_reference(*toy, cfg);
    if (const auto* pde = dynamic_cast<const Elliptic2dModel*>(&model))
      return elliptic_quadrature_reference(*pde, cfg);
    throw ConfigError("quadrature reference is available for toy1d and elliptic2d only");
  }
  return smc_reference(model, cfg, smc, seed);
}

}  // namespace mismc
