#include "mismc/multi_index.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>

#include "mismc/errors.hpp"

namespace mismc {

MultiIndex::MultiIndex(std::vector<int> components) : c_(std::move(components)) {
  if (c_.empty()) throw DomainError("multi-index must have dimension >= 1");
  for (int v : c_) {
    if (v < 0) throw DomainError("multi-index components must be >= 0");
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> components)
    : MultiIndex(std::vector<int>(components)) {}

MultiIndex MultiIndex::zeros(int dim) {
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0));
}

int MultiIndex::sum() const {
  int s = 0;
  for (int v : c_) s += v;
  return s;
}

MultiIndex MultiIndex::plus(const MultiIndex& other) const {
  assert(dim() == other.dim());
  std::vector<int> out(c_);
  for (int i = 0; i < dim(); ++i) out[i] += other[i];
  return MultiIndex(std::move(out));
}

MultiIndex MultiIndex::minus_unit(int direction) const {
  assert(direction >= 0 && direction < dim());
  if (c_[direction] == 0)
    throw DomainError("cannot decrement component already at 0");
  std::vector<int> out(c_);
  out[direction] -= 1;
  return MultiIndex(std::move(out));
}

bool MultiIndex::all_geq(const MultiIndex& other) const {
  assert(dim() == other.dim());
  for (int i = 0; i < dim(); ++i) {
    if (c_[i] < other[i]) return false;
  }
  return true;
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (int i = 0; i < dim(); ++i) {
    if (i) s += ",";
    s += std::to_string(c_[i]);
  }
  s += ")";
  return s;
}

std::vector<SignedSubIndex> subindex_expansion(const MultiIndex& alpha) {
  // Active directions are those that admit a backward difference.
  std::vector<int> active;
  for (int i = 0; i < alpha.dim(); ++i) {
    if (alpha[i] > 0) active.push_back(i);
  }
  const int m = static_cast<int>(active.size());
  std::vector<SignedSubIndex> terms;
  terms.reserve(std::size_t{1} << m);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
    std::vector<int> comps = alpha.components();
    int bits = 0;
    for (int b = 0; b < m; ++b) {
      if (mask & (std::uint32_t{1} << b)) {
        comps[active[static_cast<std::size_t>(b)]] -= 1;
        ++bits;
      }
    }
    terms.push_back(SignedSubIndex{MultiIndex(std::move(comps)),
                                   (bits % 2 == 0) ? 1 : -1,
                                   static_cast<int>(mask) + 1});
  }
  return terms;
}

IndexSet::IndexSet(IndexSetKind kind, int dim, std::vector<MultiIndex> members)
    : kind_(kind), dim_(dim), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end(), LexLess{});
}

IndexSet IndexSet::tensor_product(std::vector<int> max_levels) {
  if (max_levels.empty())
    throw DomainError("tensor-product set needs at least one direction");
  for (int l : max_levels) {
    if (l < 0) throw DomainError("tensor-product levels must be >= 0");
  }
  const int dim = static_cast<int>(max_levels.size());
  std::vector<MultiIndex> members;
  std::vector<int> cur(static_cast<std::size_t>(dim), 0);
  while (true) {
    members.push_back(MultiIndex(cur));
    int d = dim - 1;
    while (d >= 0) {
      if (cur[static_cast<std::size_t>(d)] <
          max_levels[static_cast<std::size_t>(d)]) {
        ++cur[static_cast<std::size_t>(d)];
        break;
      }
      cur[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return IndexSet(IndexSetKind::TensorProduct, dim, std::move(members));
}

IndexSet IndexSet::total_degree(int dim, double level,
                                std::vector<double> weights) {
  if (dim < 1) throw DomainError("total-degree set needs dimension >= 1");
  if (static_cast<int>(weights.size()) != dim)
    throw DomainError("total-degree weights must have one entry per direction");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || w > 1.0)
      throw DomainError("total-degree weights must lie in (0,1]");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw DomainError("total-degree weights must sum to 1");
  if (level < 0.0) throw DomainError("total-degree level must be >= 0");

  // Small floating-point slack so boundary indices (sum exactly == level)
  // are kept regardless of rounding in the weights.
  const double tol = 1e-9;
  std::vector<MultiIndex> members;
  std::vector<int> cur(static_cast<std::size_t>(dim), 0);
  auto weighted_sum = [&](const std::vector<int>& c) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
      s += weights[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
    return s;
  };
  // Depth-first enumeration over the bounded simplex.
  std::vector<int> bound(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i)
    bound[static_cast<std::size_t>(i)] = static_cast<int>(
        std::floor((level + tol) / weights[static_cast<std::size_t>(i)]));
  while (true) {
    if (weighted_sum(cur) <= level + tol) members.push_back(MultiIndex(cur));
    int d = dim - 1;
    while (d >= 0) {
      if (cur[static_cast<std::size_t>(d)] < bound[static_cast<std::size_t>(d)]) {
        ++cur[static_cast<std::size_t>(d)];
        break;
      }
      cur[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return IndexSet(IndexSetKind::TotalDegree, dim, std::move(members));
}

IndexSet IndexSet::explicit_set(std::vector<MultiIndex> members) {
  if (members.empty()) throw DomainError("explicit index set must be non-empty");
  const int dim = members.front().dim();
  std::set<std::vector<int>> seen;
  for (const auto& m : members) {
    if (m.dim() != dim)
      throw DomainError("explicit index set members must share a dimension");
    if (!seen.insert(m.components()).second)
      throw DomainError("explicit index set has duplicate member " + m.to_string());
  }
  return IndexSet(IndexSetKind::Explicit, dim, std::move(members));
}

bool IndexSet::contains(const MultiIndex& alpha) const {
  return std::binary_search(members_.begin(), members_.end(), alpha, LexLess{});
}

bool IndexSet::downward_closed() const {
  for (const auto& m : members_) {
    for (int i = 0; i < dim_; ++i) {
      if (m[i] > 0 && !contains(m.minus_unit(i))) return false;
    }
  }
  return true;
}

}  // namespace mismc
