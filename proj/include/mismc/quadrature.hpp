#pragma once

#include <vector>

namespace mismc {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1]; nodes by Newton iteration on P_n.
QuadratureRule gauss_legendre(int n);

// Composite trapezoid rule on [a, b] with n+1 equispaced nodes.
QuadratureRule trapezoid(int n, double a, double b);

template <typename F>
double integrate(const QuadratureRule& rule, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

}  // namespace mismc
