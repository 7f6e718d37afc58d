#pragma once

#include <string>

#include "mismc/harness/config.hpp"
#include "mismc/model.hpp"

namespace mismc {

struct ReferenceValue {
  double value = 0.0;
  double se = 0.0;  // 0 for deterministic quadrature references
  std::string method;
  std::string detail;
  // Disjoint-half self-consistency for sampled references.
  double half_delta = 0.0;
  double half_se = 0.0;
  int seeds = 0;
};

// Posterior expectation of the QoI used as the regression reference.
// toy1d defaults to a deterministic quadrature cross-checked by an
// independent trapezoid rule; elliptic2d supports a tensor quadrature; the
// general path averages single-level SMC runs at a fine level over disjoint
// seeds and records the standard error.
ReferenceValue compute_reference(const ForwardModel& model,
                                 const ReferenceConfig& cfg,
                                 const SmcConfig& smc, std::uint64_t seed);

}  // namespace mismc
