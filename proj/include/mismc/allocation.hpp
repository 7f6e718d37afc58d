#pragma once

#include <map>
#include <vector>

#include "mismc/multi_index.hpp"
#include "mismc/rng.hpp"

namespace mismc {

// Product-geometric sampling distribution over physical indices alpha >=
// offset, with p(alpha) proportional to prod_i 2^(-(alpha_i - offset_i) *
// (beta_i + gamma_i) / 2). Normalization is the closed-form product of
// (possibly truncated) geometric series, so probabilities are exact.
//
// max_level bounds the per-direction depth relative to the offset; the
// geometric factors are renormalized over {0, ..., max_level}. Synthesis
// memory grows exponentially with depth, so unbounded support is not
// realizable; the default cap of 62 leaves the distribution numerically
// indistinguishable from the untruncated one for every configured rate.
class AllocationDistribution {
 public:
  // rates[i] = (beta_i, gamma_i); requires beta_i > gamma_i > 0.
  AllocationDistribution(std::vector<std::pair<double, double>> rates,
                         MultiIndex offset, int max_level = 62);

  int dim() const { return offset_.dim(); }
  const MultiIndex& offset() const { return offset_; }
  int max_level() const { return max_level_; }
  // Per-direction geometric ratio q_i = 2^(-(beta_i + gamma_i)/2).
  double ratio(int direction) const { return q_[static_cast<std::size_t>(direction)]; }

  // Exact probability mass at a physical index; throws DomainError below
  // the offset or beyond the cap.
  double probability(const MultiIndex& alpha_phys) const;

  MultiIndex sample(RngStream& rng) const;

  const std::vector<std::pair<double, double>>& rates() const { return rates_; }

 private:
  std::vector<std::pair<double, double>> rates_;
  std::vector<double> q_;
  std::vector<double> tail_;  // q_i^(max_level + 1)
  MultiIndex offset_;
  int max_level_ = 62;
};

using AllocationCounts = std::map<MultiIndex, long, LexLess>;

// Draws total/n_min i.i.d. indices from dist and returns scaled counts
// N_alpha = n_min * #{draws == alpha}; the counts sum to total exactly.
// total must be a positive multiple of n_min.
AllocationCounts sample_allocation(const AllocationDistribution& dist,
                                   long total, long n_min, RngStream& rng);

}  // namespace mismc
