#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mismc {

// A resolution multi-index: one non-negative exponent per direction, mesh
// diameter 2^(-alpha_i) in direction i.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> components);
  MultiIndex(std::initializer_list<int> components);
  static MultiIndex zeros(int dim);

  int dim() const { return static_cast<int>(c_.size()); }
  int operator[](int i) const { return c_[i]; }
  int& operator[](int i) { return c_[i]; }
  const std::vector<int>& components() const { return c_; }

  int sum() const;

  MultiIndex plus(const MultiIndex& other) const;
  MultiIndex minus_unit(int direction) const;  // alpha - e_i (must stay >= 0)

  bool operator==(const MultiIndex& other) const { return c_ == other.c_; }
  bool operator!=(const MultiIndex& other) const { return c_ != other.c_; }
  // Componentwise comparison (partial order).
  bool all_geq(const MultiIndex& other) const;
  bool all_leq(const MultiIndex& other) const { return other.all_geq(*this); }

  std::string to_string() const;  // "(a1,...,aD)"

 private:
  std::vector<int> c_;
};

// Lexicographic order; used wherever a deterministic enumeration or
// reduction order over indices is required.
struct LexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return a.components() < b.components();
  }
};

// One term of the first-order mixed difference at alpha: alpha minus a
// subset S of unit vectors (directions with alpha_i = 0 excluded), with
// sign (-1)^|S| and 1-based enumeration position.
struct SignedSubIndex {
  MultiIndex index;
  int sign = 1;
  int position = 1;
};

// Expands the mixed-difference operator at alpha. The first element is
// always (alpha, +1); directions with alpha_i = 0 contribute only the
// identity term, so the list has 2^m entries with m = #{i : alpha_i > 0}.
std::vector<SignedSubIndex> subindex_expansion(const MultiIndex& alpha);

enum class IndexSetKind { TensorProduct, TotalDegree, Explicit };

// A finite, downward-closed set of multi-indices (relative to the model's
// starting level). Members are enumerated lexicographically.
class IndexSet {
 public:
  static IndexSet tensor_product(std::vector<int> max_levels);
  // All alpha with sum_i weights[i]*alpha_i <= level; weights must lie in
  // (0,1] and sum to 1.
  static IndexSet total_degree(int dim, double level,
                               std::vector<double> weights);
  static IndexSet explicit_set(std::vector<MultiIndex> members);

  IndexSetKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<MultiIndex>& members() const { return members_; }
  bool contains(const MultiIndex& alpha) const;
  bool downward_closed() const;

 private:
  IndexSet(IndexSetKind kind, int dim, std::vector<MultiIndex> members);

  IndexSetKind kind_;
  int dim_;
  std::vector<MultiIndex> members_;
};

}  // namespace mismc
