#include "mismc/model.hpp"

#include <cmath>

namespace mismc {

double ForwardModel::cost(const MultiIndex& alpha_phys) const {
  const auto& gamma = cost_exponents();
  double c = 1.0;
  for (int i = 0; i < alpha_phys.dim(); ++i)
    c *= std::exp2(alpha_phys[i] * gamma[static_cast<std::size_t>(i)]);
  return c;
}

}  // namespace mismc
