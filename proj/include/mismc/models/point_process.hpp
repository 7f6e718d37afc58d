#pragma once

#include <array>
#include <string>
#include <vector>

#include "mismc/models/spectral_field.hpp"

namespace mismc {

using PointPattern = std::vector<std::array<double, 2>>;

enum class PointProcessKind { Cox, DensityModel };

// Point-process inference on [0,1]^2 with intensity/density exp(x(z)) for a
// spectral Gaussian field x. Two likelihoods share the machinery:
//   Cox:          log L = sum_i x^(z_i) - Q(exp x)
//   DensityModel: log L = sum_i x^(z_i) - n log Q(exp x)
// with x^ the bilinear interpolant of the synthesis grid and Q the trapezoid
// rule on the same grid. QoI is Q(exp x).
struct PointProcessConfig {
  PointProcessKind kind = PointProcessKind::Cox;
  SpectralPriorConfig prior;
  MultiIndex start_index{5, 5};
  PointPattern points;
  std::vector<double> gamma = {1.0, 1.0};
  bool synthetic_data = false;  // provenance flag carried into outputs
};

class PointProcessModel final : public ForwardModel {
 public:
  explicit PointProcessModel(PointProcessConfig cfg);

  std::string name() const override {
    return cfg_.kind == PointProcessKind::Cox ? "lgc" : "lgp";
  }
  int index_dim() const override { return 2; }
  MultiIndex start_index() const override { return cfg_.start_index; }
  const std::vector<double>& cost_exponents() const override { return cfg_.gamma; }

  State sample_prior(const MultiIndex& alpha_phys, RngStream& rng) const override;
  Evaluation evaluate(const MultiIndex& alpha_phys, const State& x) const override;
  State propose(const State& x, double step, RngStream& rng) const override;

  const PointProcessConfig& config() const { return cfg_; }
  const SpectralField& field() const { return field_; }

  // Likelihood/QoI from an already synthesized grid (exposed for audits).
  Evaluation evaluate_grid(const std::vector<double>& grid, int m1, int m2) const;

 private:
  PointProcessConfig cfg_;
  SpectralField field_;
};

// Inhomogeneous Poisson pattern on [0,1]^2 with intensity exp(x^) for a
// fresh prior draw at the given level, by thinning a dominating homogeneous
// process (the interpolant's supremum is attained at a grid node).
PointPattern simulate_cox_points(const SpectralField& field, const MultiIndex& level,
                                 RngStream& rng);

// n i.i.d. points from the density proportional to exp(x^), by rejection.
PointPattern simulate_density_points(const SpectralField& field,
                                     const MultiIndex& level, int n, RngStream& rng);

// Two-column CSV (header "z1,z2") of points in [0,1]^2.
PointPattern read_point_csv(const std::string& path);
void write_point_csv(const std::string& path, const PointPattern& points);

}  // namespace mismc
