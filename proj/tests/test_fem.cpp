#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "mismc/errors.hpp"
#include "mismc/fem.hpp"
#include "mismc/rates.hpp"

using namespace mismc;

TEST_SUITE_BEGIN("fem");

TEST_CASE("1D stiffness entries for unit coefficient") {
  const int cells = 8;
  const double h = 1.0 / cells;
  const Tridiag m = assemble_stiffness_1d(cells, [](double) { return 1.0; });
  for (double d : m.diag) CHECK(d == doctest::Approx(2.0 / h).epsilon(1e-12));
  for (double o : m.off) CHECK(o == doctest::Approx(-1.0 / h).epsilon(1e-12));
}

TEST_CASE("1D solve matches the analytic solution at O(h^2)") {
  // -u'' = 1, u(0) = u(1) = 0  =>  u = (z - z^2) / 2.
  double prev_err = 0.0;
  for (int level = 3; level <= 7; ++level) {
    const int cells = 1 << level;
    const auto u = fem_solve_1d(level, [](double) { return 1.0; },
                                [](double) { return 1.0; });
    double err = 0.0;
    for (int i = 0; i <= 50; ++i) {
      const double z = i / 50.0;
      err = std::max(err, std::abs(interp_nodal_1d(u, cells, z) -
                                   0.5 * (z - z * z)));
    }
    if (level > 3) CHECK(err < 0.35 * prev_err);  // ~4x drop per level
    prev_err = err;
  }
}

TEST_CASE("1D zero forcing gives the zero solution") {
  const auto u = fem_solve_1d(4, [](double) { return 1.0; },
                              [](double) { return 0.0; });
  for (double v : u) CHECK(v == 0.0);
}

TEST_CASE("1D rejects non-elliptic coefficients") {
  CHECK_THROWS_AS(
      assemble_stiffness_1d(8, [](double z) { return z - 0.5; }),
      EvaluationError);
}

TEST_CASE("2D stiffness is symmetric positive definite (dense check)") {
  const Grid2d grid = Grid2d::make(5, 5);
  const BandMatrix m = assemble_stiffness_2d(
      grid, [](double z1, double z2) { return 2.0 + std::sin(z1 + z2); });
  const auto dense = m.to_dense();
  Eigen::MatrixXd a(grid.n, grid.n);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j)
      a(i, j) = dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12 * a.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("band Cholesky agrees with a dense solve") {
  const Grid2d grid = Grid2d::make(8, 4);
  BandMatrix m = assemble_stiffness_2d(
      grid, [](double z1, double z2) { return 1.5 + 0.5 * std::cos(3 * z1) * std::sin(z2); });
  const auto load = assemble_load_2d(grid, [](double z1, double) { return 1.0 + z1; });

  const auto dense = m.to_dense();
  Eigen::MatrixXd a(grid.n, grid.n);
  Eigen::VectorXd b(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    b(i) = load[static_cast<std::size_t>(i)];
    for (int j = 0; j < grid.n; ++j)
      a(i, j) = dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd x_ref = a.ldlt().solve(b);

  m.cholesky_in_place();
  const auto x = m.solve(load);
  for (int i = 0; i < grid.n; ++i)
    CHECK(x[static_cast<std::size_t>(i)] == doctest::Approx(x_ref(i)).epsilon(1e-10));
}

TEST_CASE("Galerkin residual is at solver precision") {
  const Grid2d grid = Grid2d::make(16, 16);
  const auto coef = [](double z1, double z2) { return 3.0 + std::sin(z1) * std::cos(z2); };
  const auto f = [](double, double) { return 100.0; };
  BandMatrix m = assemble_stiffness_2d(grid, coef);
  const auto dense = m.to_dense();
  const auto load = assemble_load_2d(grid, f);
  const auto u = fem_solve_2d(MultiIndex{4, 4}, coef, f);
  double rnorm = 0.0, bnorm = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < grid.n; ++j)
      s += dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
           u[static_cast<std::size_t>(j)];
    const double r = s - load[static_cast<std::size_t>(i)];
    rnorm += r * r;
    bnorm += load[static_cast<std::size_t>(i)] * load[static_cast<std::size_t>(i)];
  }
  CHECK(std::sqrt(rnorm) < 1e-10 * std::sqrt(bnorm));
}

TEST_CASE("manufactured solution converges at second order in L2") {
  const double pi = std::numbers::pi;
  const auto uex = [&](double z1, double z2) { return std::sin(pi * z1) * std::sin(pi * z2); };
  const auto f = [&](double z1, double z2) { return 2.0 * pi * pi * uex(z1, z2); };
  std::vector<RatePoint> pts;
  for (int level = 2; level <= 5; ++level) {
    const Grid2d grid = Grid2d::at_level(MultiIndex{level, level});
    const auto u = fem_solve_2d(MultiIndex{level, level},
                                [](double, double) { return 1.0; }, f);
    double err2 = 0.0;
    const int s = 4;
    for (int i = 0; i < grid.kx * s; ++i) {
      for (int j = 0; j < grid.ky * s; ++j) {
        const double z1 = (i + 0.5) / (grid.kx * s);
        const double z2 = (j + 0.5) / (grid.ky * s);
        const double d = interp_bilinear_2d(grid, u, z1, z2) - uex(z1, z2);
        err2 += d * d;
      }
    }
    err2 = std::sqrt(err2 / (grid.kx * s * grid.ky * s));
    pts.push_back(RatePoint{static_cast<double>(level), err2});
  }
  const RateFit fit = fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("matrix-free CG matches the band solve") {
  const auto coef = [](double z1, double z2) { return 2.0 + z1 * z2; };
  const auto f = [](double z1, double) { return 10.0 * z1; };
  const Grid2d grid = Grid2d::make(16, 8);
  BandMatrix m = assemble_stiffness_2d(grid, coef);
  m.cholesky_in_place();
  const auto x_band = m.solve(assemble_load_2d(grid, f));
  const auto x_cg = fem_solve_2d_cg(grid, coef, f, 1e-12);
  for (int i = 0; i < grid.n; ++i)
    CHECK(x_cg[static_cast<std::size_t>(i)] ==
          doctest::Approx(x_band[static_cast<std::size_t>(i)]).epsilon(1e-8));
}

TEST_CASE("degenerate grids have no interior unknowns") {
  const auto u = fem_solve_2d(MultiIndex{0, 3}, [](double, double) { return 1.0; },
                              [](double, double) { return 1.0; });
  CHECK(u.empty());
  const Grid2d g = Grid2d::at_level(MultiIndex{0, 3});
  CHECK(interp_bilinear_2d(g, u, 0.4, 0.6) == 0.0);
}

TEST_SUITE_END();
