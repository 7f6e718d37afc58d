#pragma once

#include <complex>
#include <vector>

#include "mismc/model.hpp"
#include "mismc/multi_index.hpp"
#include "mismc/rng.hpp"

namespace mismc {

// Periodic Gaussian random field on [0,2]^2 given by a truncated Fourier
// series: x(z) = theta1 + sum_k zeta_k (xi_k phi_k(z) + conj(xi_k)
// phi_{-k}(z)) over the half-plane wavenumber set, with orthonormal basis
// phi_k(z) = exp(i pi k.z)/2 and xi_k i.i.d. standard complex normal.
// Coefficient variances decay as
//   zeta_k^2 = theta2 / ((theta3 + k1^2)(theta3 + k2^2))^((beta+1)/2).
struct SpectralPriorConfig {
  double theta1 = 0.0;
  double theta2 = 1.0;
  double theta3 = 1.0;
  double beta_smoothness = 3.0;
  // Truncation |k_i| <= 2^(alpha_i) by default; the half-exponent variant
  // uses |k_i| <= 2^(alpha_i / 2).
  bool half_exponent_truncation = false;
};

class SpectralField {
 public:
  explicit SpectralField(SpectralPriorConfig cfg);

  const SpectralPriorConfig& config() const { return cfg_; }

  int k_max(int alpha_component) const;
  // Number of half-plane wavenumbers in the truncation set at alpha.
  long coeff_count(const MultiIndex& alpha) const;
  double zeta_sq(int k1, int k2) const;

  // State packing: [re, im] per wavenumber, rows k2 = 1..K2 with k1 = -K1..K1,
  // then the axis k2 = 0 with k1 = 1..K1. Components are N(0, 1/2) each.
  State sample_coefficients(const MultiIndex& alpha, RngStream& rng) const;
  State pcn_propose(const State& x, double step, RngStream& rng) const;

  // Grid sizes used for synthesis at a resolution: m_i = 2^(alpha_i + 1)
  // points over [0,2] per direction (spacing 2/m_i).
  static int grid_size(int alpha_component) { return 2 << alpha_component; }

  // Real field values on the synthesis grid (row-major, index j2 * m1 + j1,
  // z = (2 j1/m1, 2 j2/m2)), from the state's coefficients truncated to
  // alpha_eval. Requires alpha_eval <= state.alpha componentwise.
  std::vector<double> grid_values(const State& state,
                                  const MultiIndex& alpha_eval) const;

  // Analytic pointwise variance of the truncated field at z.
  double pointwise_variance(const MultiIndex& alpha, double z1, double z2) const;

 private:
  long slot(int k1, int k2, const MultiIndex& state_alpha) const;

  SpectralPriorConfig cfg_;
};

// Bilinear interpolation of a synthesis-grid field at z in [0,2)^2.
double interp_field(const std::vector<double>& grid, int m1, int m2,
                    double z1, double z2);

// Trapezoid quadrature of exp(field) over the unit square [0,1]^2 using the
// synthesis-grid nodes that fall inside it.
double quadrature_exp_unit_square(const std::vector<double>& grid, int m1, int m2);

}  // namespace mismc
