#include "mismc/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "mismc/errors.hpp"

namespace mismc {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need n >= 1");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Roots are symmetric; solve for the first half with Newton from the
  // Chebyshev-like initial guess.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(x) and P'_n(x).
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

QuadratureRule trapezoid(int n, double a, double b) {
  if (n < 1) throw DomainError("trapezoid: need n >= 1");
  if (!(b > a)) throw DomainError("trapezoid: need b > a");
  QuadratureRule rule;
  const double h = (b - a) / n;
  rule.nodes.resize(static_cast<std::size_t>(n + 1));
  rule.weights.resize(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = a + h * i;
    rule.weights[static_cast<std::size_t>(i)] =
        (i == 0 || i == n) ? 0.5 * h : h;
  }
  return rule;
}

}  // namespace mismc
