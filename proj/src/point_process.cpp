#include "mismc/models/point_process.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mismc/errors.hpp"

namespace mismc {

PointProcessModel::PointProcessModel(PointProcessConfig cfg)
    : cfg_(std::move(cfg)), field_(cfg_.prior) {
  if (cfg_.start_index.dim() != 2)
    throw ConfigError("point process: start_index must be 2-dimensional");
  if (cfg_.gamma.size() != 2)
    throw ConfigError("point process: gamma needs 2 entries");
  if (cfg_.points.empty())
    throw ConfigError("point process: point pattern must be non-empty");
  for (const auto& p : cfg_.points) {
    if (p[0] < 0.0 || p[0] > 1.0 || p[1] < 0.0 || p[1] > 1.0)
      throw ConfigError("point process: data point outside [0,1]^2");
  }
}

State PointProcessModel::sample_prior(const MultiIndex& alpha_phys,
                                      RngStream& rng) const {
  return field_.sample_coefficients(alpha_phys, rng);
}

Evaluation PointProcessModel::evaluate_grid(const std::vector<double>& grid,
                                            int m1, int m2) const {
  double sum_at_points = 0.0;
  for (const auto& p : cfg_.points)
    sum_at_points += interp_field(grid, m1, m2, p[0], p[1]);
  const double q = quadrature_exp_unit_square(grid, m1, m2);
  double log_lik;
  if (cfg_.kind == PointProcessKind::Cox) {
    log_lik = sum_at_points - q;
  } else {
    log_lik = sum_at_points -
              static_cast<double>(cfg_.points.size()) * std::log(q);
  }
  return Evaluation{log_lik, q};
}

Evaluation PointProcessModel::evaluate(const MultiIndex& alpha_phys,
                                       const State& x) const {
  const std::vector<double> grid = field_.grid_values(x, alpha_phys);
  return evaluate_grid(grid, SpectralField::grid_size(alpha_phys[0]),
                       SpectralField::grid_size(alpha_phys[1]));
}

State PointProcessModel::propose(const State& x, double step, RngStream& rng) const {
  return field_.pcn_propose(x, step, rng);
}

PointPattern simulate_cox_points(const SpectralField& field, const MultiIndex& level,
                                 RngStream& rng) {
  State coeffs = field.sample_coefficients(level, rng);
  const std::vector<double> grid = field.grid_values(coeffs, level);
  const int m1 = SpectralField::grid_size(level[0]);
  const int m2 = SpectralField::grid_size(level[1]);
  // The bilinear interpolant attains its maximum at a grid node; restrict to
  // nodes covering [0,1]^2.
  double x_max = -1e300;
  for (int j2 = 0; j2 <= m2 / 2; ++j2)
    for (int j1 = 0; j1 <= m1 / 2; ++j1)
      x_max = std::max(x_max, grid[static_cast<std::size_t>(j2) * m1 + j1]);
  const double lambda_max = std::exp(x_max);
  const long total = rng.poisson(lambda_max);  // area of [0,1]^2 is 1
  PointPattern points;
  points.reserve(static_cast<std::size_t>(total) / 2 + 1);
  for (long i = 0; i < total; ++i) {
    const double z1 = rng.uniform01();
    const double z2 = rng.uniform01();
    const double intensity = std::exp(interp_field(grid, m1, m2, z1, z2));
    if (rng.uniform01() * lambda_max < intensity) points.push_back({z1, z2});
  }
  return points;
}

PointPattern simulate_density_points(const SpectralField& field,
                                     const MultiIndex& level, int n, RngStream& rng) {
  if (n < 1) throw DomainError("simulate_density_points: need n >= 1");
  State coeffs = field.sample_coefficients(level, rng);
  const std::vector<double> grid = field.grid_values(coeffs, level);
  const int m1 = SpectralField::grid_size(level[0]);
  const int m2 = SpectralField::grid_size(level[1]);
  double x_max = -1e300;
  for (int j2 = 0; j2 <= m2 / 2; ++j2)
    for (int j1 = 0; j1 <= m1 / 2; ++j1)
      x_max = std::max(x_max, grid[static_cast<std::size_t>(j2) * m1 + j1]);
  PointPattern points;
  points.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(points.size()) < n) {
    const double z1 = rng.uniform01();
    const double z2 = rng.uniform01();
    const double ratio = std::exp(interp_field(grid, m1, m2, z1, z2) - x_max);
    if (rng.uniform01() < ratio) points.push_back({z1, z2});
  }
  return points;
}

PointPattern read_point_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open point-pattern file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty point-pattern file: " + path);
  // Strip optional UTF-8 BOM and trailing CR.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "z1,z2")
    throw ConfigError("point-pattern file must start with header 'z1,z2': " + path);
  PointPattern points;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    double z1, z2;
    char comma;
    if (!(ss >> z1 >> comma >> z2) || comma != ',')
      throw ConfigError("malformed point row at line " + std::to_string(lineno) +
                        " of " + path);
    if (z1 < 0.0 || z1 > 1.0 || z2 < 0.0 || z2 > 1.0)
      throw ConfigError("point outside [0,1]^2 at line " + std::to_string(lineno) +
                        " of " + path);
    points.push_back({z1, z2});
  }
  if (points.empty()) throw ConfigError("point-pattern file has no rows: " + path);
  return points;
}

void write_point_csv(const std::string& path, const PointPattern& points) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write point-pattern file: " + path);
  out << "z1,z2\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p[0], p[1]);
    out << buf;
  }
}

}  // namespace mismc
