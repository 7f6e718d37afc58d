#include "mismc/estimators.hpp"

#include <cmath>
#include <vector>

#include "mismc/errors.hpp"
#include "mismc/parallel.hpp"

namespace mismc {

namespace {

// Tag layers for seed derivation: per-index SMC streams are keyed by the
// physical index so that estimators sharing a master stream reproduce each
// other's runs exactly (a point-mass randomized estimator coincides with the
// single-level one bit for bit).
constexpr std::uint64_t kTagIndexRun = 1;
constexpr std::uint64_t kTagAllocation = 2;

RngStream index_stream(const RngStream& rng, const MultiIndex& alpha_phys) {
  RngStream s = rng.child(kTagIndexRun);
  for (int i = 0; i < alpha_phys.dim(); ++i)
    s = s.child(static_cast<std::uint64_t>(alpha_phys[i]));
  return s;
}

EstimateResult finalize_ratio(double numerator, double denominator_raw,
                              double z_min) {
  if (!(z_min > 0.0)) throw ConfigError("estimator z_min must be > 0");
  EstimateResult r;
  r.numerator = numerator;
  r.denominator_raw = denominator_raw;
  r.clamped = denominator_raw < z_min;
  r.value = numerator / std::max(denominator_raw, z_min);
  return r;
}

}  // namespace

EstimateResult single_level_estimate(const ForwardModel& model,
                                     const MultiIndex& alpha_phys, int n_particles,
                                     const EstimatorParams& params, RngStream rng) {
  const IncrementEstimate inc =
      run_smc(model, single_level_terms(alpha_phys), n_particles, params.smc,
              index_stream(rng, alpha_phys));
  EstimateResult r = finalize_ratio(inc.f_phi, inc.f_one, params.z_min);
  r.total_cost = inc.cost;
  r.populated[alpha_phys] = n_particles;
  return r;
}

EstimateResult mismc_estimate(const ForwardModel& model, const IndexSet& set,
                              const std::map<MultiIndex, long, LexLess>& n_per_alpha,
                              const EstimatorParams& params, RngStream rng) {
  if (set.dim() != model.index_dim())
    throw DomainError("mismc_estimate: index-set dimension mismatch");
  if (!set.downward_closed())
    throw DomainError("mismc_estimate: index set is not downward closed");
  const auto& members = set.members();
  std::vector<long> n_alpha(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto it = n_per_alpha.find(members[i]);
    if (it == n_per_alpha.end())
      throw DomainError("mismc_estimate: no sample size for index " +
                        members[i].to_string());
    if (it->second < 2)
      throw DomainError("mismc_estimate: need N >= 2 at index " +
                        members[i].to_string());
    n_alpha[i] = it->second;
  }

  std::vector<IncrementEstimate> runs(members.size());
  parallel_for(static_cast<std::int64_t>(members.size()), [&](std::int64_t i) {
    const MultiIndex alpha_phys = model.to_physical(members[static_cast<std::size_t>(i)]);
    runs[static_cast<std::size_t>(i)] =
        run_smc(model, increment_terms(model, members[static_cast<std::size_t>(i)]),
                static_cast<int>(n_alpha[static_cast<std::size_t>(i)]), params.smc,
                index_stream(rng, alpha_phys));
  });

  // Reduction in lexicographic member order keeps summation reproducible.
  double num = 0.0, den = 0.0, cost = 0.0;
  for (const auto& run : runs) {
    num += run.f_phi;
    den += run.f_one;
    cost += run.cost;
  }
  EstimateResult r = finalize_ratio(num, den, params.z_min);
  r.total_cost = cost;
  for (std::size_t i = 0; i < members.size(); ++i)
    r.populated[model.to_physical(members[i])] = n_alpha[i];
  return r;
}

EstimateResult rmismc_estimate(const ForwardModel& model,
                               const AllocationDistribution& dist, long n_total,
                               long n_min, const EstimatorParams& params,
                               RngStream rng) {
  if (dist.dim() != model.index_dim())
    throw DomainError("rmismc_estimate: allocation dimension mismatch");
  if (dist.offset() != model.start_index())
    throw ConfigError("rmismc_estimate: allocation offset must equal the model's starting level");
  if (n_min < 2)
    throw DomainError("rmismc_estimate: n_min must be >= 2 (SMC needs 2 particles)");

  RngStream alloc_rng = rng.child(kTagAllocation);
  const AllocationCounts counts = sample_allocation(dist, n_total, n_min, alloc_rng);

  std::vector<std::pair<MultiIndex, long>> populated(counts.begin(), counts.end());
  std::vector<IncrementEstimate> runs(populated.size());
  parallel_for(static_cast<std::int64_t>(populated.size()), [&](std::int64_t i) {
    const auto& [alpha_phys, n_alpha] = populated[static_cast<std::size_t>(i)];
    std::vector<int> rel(static_cast<std::size_t>(alpha_phys.dim()));
    for (int d = 0; d < alpha_phys.dim(); ++d)
      rel[static_cast<std::size_t>(d)] = alpha_phys[d] - model.start_index()[d];
    runs[static_cast<std::size_t>(i)] =
        run_smc(model, increment_terms(model, MultiIndex(rel)),
                static_cast<int>(n_alpha), params.smc, index_stream(rng, alpha_phys));
  });

  double num = 0.0, den = 0.0, cost = 0.0;
  for (std::size_t i = 0; i < populated.size(); ++i) {
    const auto& [alpha_phys, n_alpha] = populated[i];
    const double scale = static_cast<double>(n_alpha) /
                         (static_cast<double>(n_total) * dist.probability(alpha_phys));
    num += scale * runs[i].f_phi;
    den += scale * runs[i].f_one;
    cost += runs[i].cost;
  }
  EstimateResult r = finalize_ratio(num, den, params.z_min);
  r.total_cost = cost;
  for (const auto& [alpha_phys, n_alpha] : populated) r.populated[alpha_phys] = n_alpha;
  return r;
}

std::map<MultiIndex, long, LexLess> allocate_samples_deterministic(
    const IndexSet& set, const std::vector<double>& beta,
    const std::vector<double>& gamma, double budget, long n_floor,
    const std::function<double(const MultiIndex&)>& cost_per_particle) {
  if (n_floor < 2) throw DomainError("allocate_samples: n_floor must be >= 2");
  if (static_cast<int>(beta.size()) != set.dim() ||
      static_cast<int>(gamma.size()) != set.dim())
    throw DomainError("allocate_samples: rate dimension mismatch");
  const auto& members = set.members();

  std::vector<double> weight(members.size());
  std::vector<double> cpp(members.size());
  double floor_cost = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    double w = 1.0;
    for (int d = 0; d < set.dim(); ++d)
      w *= std::exp2(-0.5 * members[i][d] *
                     (beta[static_cast<std::size_t>(d)] + gamma[static_cast<std::size_t>(d)]));
    weight[i] = w;
    cpp[i] = cost_per_particle(members[i]);
    if (!(cpp[i] > 0.0))
      throw DomainError("allocate_samples: cost per particle must be > 0");
    floor_cost += static_cast<double>(n_floor) * cpp[i];
  }
  if (budget < floor_cost)
    throw InfeasibleBudgetError(
        "allocation budget " + std::to_string(budget) +
            " below minimum feasible " + std::to_string(floor_cost),
        floor_cost);

  auto total_at = [&](double lambda) {
    double t = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i)
      t += std::max(static_cast<double>(n_floor), lambda * weight[i]) * cpp[i];
    return t;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (total_at(hi) < budget) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total_at(mid) <= budget)
      lo = mid;
    else
      hi = mid;
  }

  std::map<MultiIndex, long, LexLess> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double n = std::max(static_cast<double>(n_floor), lo * weight[i]);
    out[members[i]] = static_cast<long>(std::ceil(n - 1e-9));
  }
  return out;
}

}  // namespace mismc
