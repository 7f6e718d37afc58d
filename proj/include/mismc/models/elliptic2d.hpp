#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "mismc/fem.hpp"
#include "mismc/model.hpp"

namespace mismc {

// 2D elliptic inverse problem on [0,1]^2: -div(a(x) grad u) = f with
// a(x)(z) = 3 + x1 cos(3 z1) sin(3 z2) + x2 cos(z1) sin(z2), x ~ U[-1,1]^2,
// pointwise observations of u with Gaussian noise, QoI x1^2 + x2^2.
//
// The coefficient is affine in x, so each resolution caches three stiffness
// matrices (constant part and the two parameter modes); an evaluation
// combines them, factorizes the band matrix and solves.
struct Elliptic2dConfig {
  MultiIndex start_index{2, 2};
  double forcing = 100.0;
  double noise_sd = 0.5;
  std::vector<std::array<double, 2>> obs_points = {
      {0.25, 0.25}, {0.25, 0.75}, {0.75, 0.25}, {0.75, 0.75}};
  std::vector<double> data;                 // one value per obs point
  std::vector<double> gamma = {1.0, 1.0};   // cost exponents
};

class Elliptic2dModel final : public ForwardModel {
 public:
  explicit Elliptic2dModel(Elliptic2dConfig cfg);

  std::string name() const override { return "elliptic2d"; }
  int index_dim() const override { return 2; }
  MultiIndex start_index() const override { return cfg_.start_index; }
  const std::vector<double>& cost_exponents() const override { return cfg_.gamma; }

  State sample_prior(const MultiIndex& alpha_phys, RngStream& rng) const override;
  Evaluation evaluate(const MultiIndex& alpha_phys, const State& x) const override;
  State propose(const State& x, double step, RngStream& rng) const override;
  double qoi_bound() const override { return 2.0; }
  // Level (1,1) is the coarsest grid with interior nodes.
  MultiIndex min_index() const override { return MultiIndex{1, 1}; }

  const Elliptic2dConfig& config() const { return cfg_; }

  // Coefficient modes.
  static double psi1(double z1, double z2);
  static double psi2(double z1, double z2);

  // Observation functionals of the FEM solution at a physical level.
  std::vector<double> observe(const MultiIndex& alpha_phys, double x1, double x2) const;
  double log_likelihood(const MultiIndex& alpha_phys, double x1, double x2) const;

  // Synthetic observations y = G(u_level(x*)) + noise.
  static std::vector<double> synthesize_data(const Elliptic2dConfig& cfg,
                                             const MultiIndex& data_level,
                                             const std::array<double, 2>& x_star,
                                             RngStream& rng);

 private:
  struct LevelOps {
    Grid2d grid;
    BandMatrix a_const;  // 3 * laplacian part
    BandMatrix a_mode1;  // psi1 part
    BandMatrix a_mode2;  // psi2 part
    std::vector<double> load;
    std::vector<InterpWeights2d> obs;
  };

  const LevelOps& level_ops(const MultiIndex& alpha_phys) const;

  Elliptic2dConfig cfg_;
  double inv_var_ = 0.0;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::vector<int>, std::unique_ptr<LevelOps>> cache_;
};

}  // namespace mismc
