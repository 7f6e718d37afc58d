#include "mismc/models/spectral_field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "mismc/errors.hpp"

namespace mismc {

namespace {

// FFTW plan creation is not thread-safe; one cached backward plan per grid
// size, executed through the new-array interface with caller-owned buffers.
class FftPlanCache {
 public:
  static FftPlanCache& instance() {
    static FftPlanCache cache;
    return cache;
  }

  fftw_plan plan(int m1, int m2) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(m1, m2);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> tmp(static_cast<std::size_t>(m1) * m2);
    fftw_plan p = fftw_plan_dft_2d(
        m2, m1, reinterpret_cast<fftw_complex*>(tmp.data()),
        reinterpret_cast<fftw_complex*>(tmp.data()), FFTW_BACKWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw EvaluationError("FFTW plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  FftPlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace

SpectralField::SpectralField(SpectralPriorConfig cfg) : cfg_(cfg) {
  if (cfg_.theta2 < 0.0) throw ConfigError("spectral prior: theta2 must be >= 0");
  if (!(cfg_.theta3 > 0.0)) throw ConfigError("spectral prior: theta3 must be > 0");
  if (!(cfg_.beta_smoothness > 0.0))
    throw ConfigError("spectral prior: beta must be > 0");
}

int SpectralField::k_max(int alpha_component) const {
  if (alpha_component < 0) throw DomainError("spectral prior: negative level");
  if (cfg_.half_exponent_truncation)
    return std::max(1, static_cast<int>(std::exp2(0.5 * alpha_component)));
  return 1 << alpha_component;
}

long SpectralField::coeff_count(const MultiIndex& alpha) const {
  const long k1 = k_max(alpha[0]);
  const long k2 = k_max(alpha[1]);
  return k2 * (2 * k1 + 1) + k1;
}

double SpectralField::zeta_sq(int k1, int k2) const {
  const double d = (cfg_.theta3 + static_cast<double>(k1) * k1) *
                   (cfg_.theta3 + static_cast<double>(k2) * k2);
  return cfg_.theta2 * std::pow(d, -0.5 * (cfg_.beta_smoothness + 1.0));
}

long SpectralField::slot(int k1, int k2, const MultiIndex& state_alpha) const {
  const long K1 = k_max(state_alpha[0]);
  const long K2 = k_max(state_alpha[1]);
  if (k2 >= 1) return (k2 - 1) * (2 * K1 + 1) + (k1 + K1);
  return K2 * (2 * K1 + 1) + (k1 - 1);  // axis part, k2 == 0, k1 >= 1
}

State SpectralField::sample_coefficients(const MultiIndex& alpha,
                                         RngStream& rng) const {
  if (alpha.dim() != 2) throw DomainError("spectral prior: need a 2D index");
  State s;
  s.alpha = alpha;
  const long n = coeff_count(alpha);
  s.value.resize(static_cast<std::size_t>(2 * n));
  constexpr double kHalfSd = 0.70710678118654752440;  // sqrt(1/2)
  for (long i = 0; i < 2 * n; ++i)
    s.value[static_cast<std::size_t>(i)] = kHalfSd * rng.normal();
  return s;
}

State SpectralField::pcn_propose(const State& x, double step, RngStream& rng) const {
  State fresh = sample_coefficients(x.alpha, rng);
  const double keep = std::sqrt(std::max(0.0, 1.0 - step * step));
  State out = x;
  for (std::size_t i = 0; i < out.value.size(); ++i)
    out.value[i] = keep * x.value[i] + step * fresh.value[i];
  return out;
}

std::vector<double> SpectralField::grid_values(const State& state,
                                               const MultiIndex& alpha_eval) const {
  if (!state.alpha.all_geq(alpha_eval))
    throw EvaluationError("spectral field: evaluation resolution exceeds state resolution");
  const int m1 = grid_size(alpha_eval[0]);
  const int m2 = grid_size(alpha_eval[1]);
  const int K1 = k_max(alpha_eval[0]);
  const int K2 = k_max(alpha_eval[1]);

  std::vector<std::complex<double>> spec(static_cast<std::size_t>(m1) * m2,
                                         std::complex<double>(0.0, 0.0));
  // zeta factorizes over directions; precompute the per-direction scalings.
  const double exponent = -0.25 * (cfg_.beta_smoothness + 1.0);
  const double sqrt_theta2 = std::sqrt(cfg_.theta2);
  std::vector<double> g1(static_cast<std::size_t>(K1) + 1), g2(static_cast<std::size_t>(K2) + 1);
  for (int k = 0; k <= K1; ++k)
    g1[static_cast<std::size_t>(k)] =
        std::pow(cfg_.theta3 + static_cast<double>(k) * k, exponent);
  for (int k = 0; k <= K2; ++k)
    g2[static_cast<std::size_t>(k)] =
        std::pow(cfg_.theta3 + static_cast<double>(k) * k, exponent);

  auto wrap = [](int k, int m) { return ((k % m) + m) % m; };
  auto place = [&](int k1, int k2) {
    const long src = 2 * slot(k1, k2, state.alpha);
    const double zeta = sqrt_theta2 * g1[static_cast<std::size_t>(std::abs(k1))] *
                        g2[static_cast<std::size_t>(std::abs(k2))];
    const std::complex<double> c =
        zeta * std::complex<double>(state.value[static_cast<std::size_t>(src)],
                                    state.value[static_cast<std::size_t>(src + 1)]);
    spec[static_cast<std::size_t>(wrap(k2, m2)) * m1 + wrap(k1, m1)] += c;
    spec[static_cast<std::size_t>(wrap(-k2, m2)) * m1 + wrap(-k1, m1)] += std::conj(c);
  };
  for (int k2 = 1; k2 <= K2; ++k2)
    for (int k1 = -K1; k1 <= K1; ++k1) place(k1, k2);
  for (int k1 = 1; k1 <= K1; ++k1) place(k1, 0);

  std::vector<std::complex<double>> out(spec.size());
  fftw_execute_dft(FftPlanCache::instance().plan(m1, m2),
                   reinterpret_cast<fftw_complex*>(spec.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));

  std::vector<double> field(out.size());
  double max_abs = 0.0, max_imag = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    // phi_k carries a 1/2 normalization on [0,2]^2.
    field[i] = cfg_.theta1 + 0.5 * out[i].real();
    max_abs = std::max(max_abs, std::abs(out[i].real()));
    max_imag = std::max(max_imag, std::abs(out[i].imag()));
  }
  if (max_imag > 1e-10 * std::max(1.0, max_abs))
    throw EvaluationError("spectral field synthesis lost conjugate symmetry");
  return field;
}

double SpectralField::pointwise_variance(const MultiIndex& alpha, double z1,
                                         double z2) const {
  (void)z1;
  (void)z2;
  // |phi_k(z)|^2 = 1/4 everywhere, so the variance is position-independent:
  // sum over the set of 2 zeta_k^2 |phi_k|^2.
  const int K1 = k_max(alpha[0]);
  const int K2 = k_max(alpha[1]);
  double v = 0.0;
  for (int k2 = 1; k2 <= K2; ++k2)
    for (int k1 = -K1; k1 <= K1; ++k1) v += 0.5 * zeta_sq(k1, k2);
  for (int k1 = 1; k1 <= K1; ++k1) v += 0.5 * zeta_sq(k1, 0);
  return v;
}

double interp_field(const std::vector<double>& grid, int m1, int m2,
                    double z1, double z2) {
  const double h1 = 2.0 / m1, h2 = 2.0 / m2;
  int c1 = static_cast<int>(z1 / h1);
  int c2 = static_cast<int>(z2 / h2);
  auto node = [&](int j1, int j2) {
    j1 = ((j1 % m1) + m1) % m1;  // periodic
    j2 = ((j2 % m2) + m2) % m2;
    return grid[static_cast<std::size_t>(j2) * m1 + j1];
  };
  const double t1 = z1 / h1 - c1;
  const double t2 = z2 / h2 - c2;
  return (1.0 - t1) * (1.0 - t2) * node(c1, c2) + t1 * (1.0 - t2) * node(c1 + 1, c2) +
         (1.0 - t1) * t2 * node(c1, c2 + 1) + t1 * t2 * node(c1 + 1, c2 + 1);
}

double quadrature_exp_unit_square(const std::vector<double>& grid, int m1, int m2) {
  // Unit square corresponds to grid nodes j_i = 0 .. m_i/2 (z = 2 j / m).
  const int n1 = m1 / 2, n2 = m2 / 2;
  const double h1 = 2.0 / m1, h2 = 2.0 / m2;
  double q = 0.0;
  for (int j2 = 0; j2 <= n2; ++j2) {
    const double w2 = (j2 == 0 || j2 == n2) ? 0.5 : 1.0;
    for (int j1 = 0; j1 <= n1; ++j1) {
      const double w1 = (j1 == 0 || j1 == n1) ? 0.5 : 1.0;
      q += w1 * w2 * std::exp(grid[static_cast<std::size_t>(j2) * m1 + j1]);
    }
  }
  return q * h1 * h2;
}

}  // namespace mismc
