#include "mismc/allocation.hpp"

#include <cmath>

#include "mismc/errors.hpp"

namespace mismc {

AllocationDistribution::AllocationDistribution(
    std::vector<std::pair<double, double>> rates, MultiIndex offset, int max_level)
    : rates_(std::move(rates)), offset_(std::move(offset)), max_level_(max_level) {
  if (static_cast<int>(rates_.size()) != offset_.dim())
    throw DomainError("allocation rates must have one (beta, gamma) pair per direction");
  if (max_level_ < 0 || max_level_ > 62)
    throw DomainError("allocation max_level must lie in [0, 62]");
  q_.reserve(rates_.size());
  tail_.reserve(rates_.size());
  for (const auto& [beta, gamma] : rates_) {
    if (!(gamma > 0.0))
      throw DomainError("allocation requires gamma > 0 in every direction");
    if (!(beta > gamma))
      throw DomainError("allocation requires beta > gamma in every direction");
    const double q = std::exp2(-0.5 * (beta + gamma));
    q_.push_back(q);
    tail_.push_back(std::pow(q, max_level_ + 1));
  }
}

double AllocationDistribution::probability(const MultiIndex& alpha_phys) const {
  if (alpha_phys.dim() != dim())
    throw DomainError("allocation probability: dimension mismatch");
  if (!alpha_phys.all_geq(offset_))
    throw DomainError("allocation probability: index " + alpha_phys.to_string() +
                      " below offset " + offset_.to_string());
  double p = 1.0;
  for (int i = 0; i < dim(); ++i) {
    const int rel = alpha_phys[i] - offset_[i];
    if (rel > max_level_)
      throw DomainError("allocation probability: index " + alpha_phys.to_string() +
                        " beyond the truncation level");
    const double q = q_[static_cast<std::size_t>(i)];
    p *= (1.0 - q) * std::pow(q, rel) / (1.0 - tail_[static_cast<std::size_t>(i)]);
  }
  return p;
}

MultiIndex AllocationDistribution::sample(RngStream& rng) const {
  std::vector<int> comps(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) {
    const double q = q_[static_cast<std::size_t>(i)];
    // Inverse CDF of the geometric truncated to {0, ..., max_level}.
    const double u = rng.uniform01() * (1.0 - tail_[static_cast<std::size_t>(i)]);
    double g = std::floor(std::log1p(-u) / std::log(q));
    if (!(g >= 0.0)) g = 0.0;
    if (g > max_level_) g = max_level_;
    comps[static_cast<std::size_t>(i)] = offset_[i] + static_cast<int>(g);
  }
  return MultiIndex(std::move(comps));
}

AllocationCounts sample_allocation(const AllocationDistribution& dist,
                                   long total, long n_min, RngStream& rng) {
  if (n_min < 1) throw DomainError("sample_allocation: n_min must be >= 1");
  if (total <= 0 || total % n_min != 0)
    throw DomainError("sample_allocation: total must be a positive multiple of n_min");
  AllocationCounts counts;
  const long draws = total / n_min;
  for (long i = 0; i < draws; ++i) counts[dist.sample(rng)] += n_min;
  return counts;
}

}  // namespace mismc
