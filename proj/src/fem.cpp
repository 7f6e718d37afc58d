#include "mismc/fem.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "mismc/errors.hpp"

namespace mismc {

namespace {
constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)
}

// ---------------------------------------------------------------------------
// 1D
// ---------------------------------------------------------------------------

Tridiag assemble_stiffness_1d(int cells, const ScalarField1d& coef,
                              bool require_positive) {
  if (cells < 2) throw DomainError("assemble_stiffness_1d: need K >= 2 cells");
  const int n = cells - 1;
  const double h = 1.0 / cells;
  // Per-cell integral of the coefficient (2-point Gauss).
  std::vector<double> cell_int(static_cast<std::size_t>(cells));
  for (int e = 0; e < cells; ++e) {
    const double mid = (e + 0.5) * h;
    const double z0 = mid - 0.5 * h * kGauss;
    const double z1 = mid + 0.5 * h * kGauss;
    const double a0 = coef(z0), a1 = coef(z1);
    if (require_positive && (!(a0 > 0.0) || !(a1 > 0.0)))
      throw EvaluationError("non-elliptic coefficient in 1D assembly");
    cell_int[static_cast<std::size_t>(e)] = 0.5 * h * (a0 + a1);
  }
  Tridiag m;
  m.diag.resize(static_cast<std::size_t>(n));
  m.off.resize(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  const double inv_h2 = 1.0 / (h * h);
  for (int i = 1; i <= n; ++i) {
    m.diag[static_cast<std::size_t>(i - 1)] =
        inv_h2 * (cell_int[static_cast<std::size_t>(i - 1)] +
                  cell_int[static_cast<std::size_t>(i)]);
    if (i < n)
      m.off[static_cast<std::size_t>(i - 1)] =
          -inv_h2 * cell_int[static_cast<std::size_t>(i)];
  }
  return m;
}

std::vector<double> assemble_load_1d(int cells, const ScalarField1d& forcing) {
  if (cells < 2) throw DomainError("assemble_load_1d: need K >= 2 cells");
  const int n = cells - 1;
  const double h = 1.0 / cells;
  std::vector<double> load(static_cast<std::size_t>(n), 0.0);
  for (int e = 0; e < cells; ++e) {
    const double left = e * h;
    for (int g = 0; g < 2; ++g) {
      const double xi = (g == 0) ? -kGauss : kGauss;  // reference [-1,1]
      const double z = left + 0.5 * h * (1.0 + xi);
      const double w = 0.5 * h;  // Gauss weight 1 scaled by |J|
      const double fz = forcing(z);
      const double shape_right = (z - left) / h;  // hat of node e+1
      if (e + 1 <= n)
        load[static_cast<std::size_t>(e)] += w * fz * shape_right;
      if (e >= 1)
        load[static_cast<std::size_t>(e - 1)] += w * fz * (1.0 - shape_right);
    }
  }
  return load;
}

std::vector<double> solve_tridiag(const Tridiag& m, std::vector<double> rhs) {
  const std::size_t n = m.diag.size();
  if (rhs.size() != n) throw DomainError("solve_tridiag: size mismatch");
  std::vector<double> c(n > 0 ? n - 1 : 0);
  std::vector<double> d(n);
  double piv = m.diag[0];
  if (!(piv > 0.0)) throw EvaluationError("tridiagonal solve: singular pivot");
  if (n > 1) c[0] = m.off[0] / piv;
  d[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = m.diag[i] - m.off[i - 1] * c[i - 1];
    if (!(piv > 0.0)) throw EvaluationError("tridiagonal solve: singular pivot");
    if (i + 1 < n) c[i] = m.off[i] / piv;
    d[i] = (rhs[i] - m.off[i - 1] * d[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

std::vector<double> fem_solve_1d(int level, const ScalarField1d& coef,
                                 const ScalarField1d& forcing) {
  if (level < 1) throw DomainError("fem_solve_1d: need level >= 1 (K >= 2)");
  const int cells = 1 << level;
  const Tridiag m = assemble_stiffness_1d(cells, coef);
  return solve_tridiag(m, assemble_load_1d(cells, forcing));
}

double interp_nodal_1d(const std::vector<double>& u_interior, int cells, double z) {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  const double h = 1.0 / cells;
  int cell = static_cast<int>(z / h);
  cell = std::clamp(cell, 0, cells - 1);
  const double t = (z - cell * h) / h;
  auto nodal = [&](int node) -> double {
    if (node <= 0 || node >= cells) return 0.0;
    return u_interior[static_cast<std::size_t>(node - 1)];
  };
  return (1.0 - t) * nodal(cell) + t * nodal(cell + 1);
}

// ---------------------------------------------------------------------------
// 2D
// ---------------------------------------------------------------------------

Grid2d Grid2d::make(int kx, int ky) {
  if (kx < 1 || ky < 1) throw DomainError("Grid2d: need at least one cell per direction");
  Grid2d g;
  g.kx = kx;
  g.ky = ky;
  g.hx = 1.0 / kx;
  g.hy = 1.0 / ky;
  g.nx = kx - 1;
  g.ny = ky - 1;
  g.n = g.nx * g.ny;
  g.y_fast = g.ny < g.nx;  // order along the shorter direction for bandwidth
  return g;
}

Grid2d Grid2d::at_level(const MultiIndex& alpha) {
  if (alpha.dim() != 2) throw DomainError("Grid2d::at_level: need a 2D index");
  return make(1 << alpha[0], 1 << alpha[1]);
}

BandMatrix::BandMatrix(int n, int half_bandwidth)
    : n_(n), hbw_(half_bandwidth) {
  a_.assign(static_cast<std::size_t>(n_) * (hbw_ + 1), 0.0);
}

double& BandMatrix::at(int i, int j) {
  assert(i <= j && j <= i + hbw_ && j < n_);
  return a_[static_cast<std::size_t>(i) * (hbw_ + 1) + (j - i)];
}

double BandMatrix::at(int i, int j) const {
  assert(i <= j && j <= i + hbw_ && j < n_);
  return a_[static_cast<std::size_t>(i) * (hbw_ + 1) + (j - i)];
}

void BandMatrix::cholesky_in_place() {
  const int b = hbw_;
  for (int k = 0; k < n_; ++k) {
    double* rowk = &a_[static_cast<std::size_t>(k) * (b + 1)];
    if (!(rowk[0] > 0.0))
      throw EvaluationError("band Cholesky: nonpositive pivot (matrix not SPD)");
    rowk[0] = std::sqrt(rowk[0]);
    const int reach = std::min(b, n_ - 1 - k);
    const double inv = 1.0 / rowk[0];
    for (int j = 1; j <= reach; ++j) rowk[j] *= inv;
    for (int i = 1; i <= reach; ++i) {
      double* rowi = &a_[static_cast<std::size_t>(k + i) * (b + 1)];
      const double f = rowk[i];
      if (f == 0.0) continue;
      for (int j = i; j <= reach; ++j) rowi[j - i] -= f * rowk[j];
    }
  }
}

std::vector<double> BandMatrix::solve(std::vector<double> rhs) const {
  assert(static_cast<int>(rhs.size()) == n_);
  const int b = hbw_;
  // U^T y = rhs
  for (int i = 0; i < n_; ++i) {
    double s = rhs[static_cast<std::size_t>(i)];
    const int lo = std::max(0, i - b);
    for (int k = lo; k < i; ++k)
      s -= a_[static_cast<std::size_t>(k) * (b + 1) + (i - k)] *
           rhs[static_cast<std::size_t>(k)];
    rhs[static_cast<std::size_t>(i)] =
        s / a_[static_cast<std::size_t>(i) * (b + 1)];
  }
  // U x = y
  for (int i = n_ - 1; i >= 0; --i) {
    double s = rhs[static_cast<std::size_t>(i)];
    const int hi = std::min(n_ - 1, i + b);
    for (int j = i + 1; j <= hi; ++j)
      s -= a_[static_cast<std::size_t>(i) * (b + 1) + (j - i)] *
           rhs[static_cast<std::size_t>(j)];
    rhs[static_cast<std::size_t>(i)] =
        s / a_[static_cast<std::size_t>(i) * (b + 1)];
  }
  return rhs;
}

std::vector<std::vector<double>> BandMatrix::to_dense() const {
  std::vector<std::vector<double>> d(
      static_cast<std::size_t>(n_),
      std::vector<double>(static_cast<std::size_t>(n_), 0.0));
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j <= std::min(n_ - 1, i + hbw_); ++j) {
      d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = at(i, j);
      d[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = at(i, j);
    }
  }
  return d;
}

namespace {

// Reference-element data for the 2x2 Gauss rule on bilinear quads.
struct GaussPoint {
  double xi, eta;
};
constexpr GaussPoint kGp[4] = {{-kGauss, -kGauss},
                               {kGauss, -kGauss},
                               {-kGauss, kGauss},
                               {kGauss, kGauss}};
// Corner order: (0,0), (1,0), (0,1), (1,1) in cell-local coordinates.
constexpr double kXiA[4] = {-1.0, 1.0, -1.0, 1.0};
constexpr double kEtaA[4] = {-1.0, -1.0, 1.0, 1.0};

inline double shape(int a, double xi, double eta) {
  return 0.25 * (1.0 + kXiA[a] * xi) * (1.0 + kEtaA[a] * eta);
}
inline double dshape_dxi(int a, double eta) {
  return 0.25 * kXiA[a] * (1.0 + kEtaA[a] * eta);
}
inline double dshape_deta(int a, double xi) {
  return 0.25 * kEtaA[a] * (1.0 + kXiA[a] * xi);
}

// Local 4x4 stiffness for one element given the coefficient at the four
// Gauss points.
void local_stiffness(const Grid2d& g, const double coef_g[4], double ke[4][4]) {
  const double jac = 0.25 * g.hx * g.hy;
  const double sx = 2.0 / g.hx;
  const double sy = 2.0 / g.hy;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) ke[a][b] = 0.0;
  for (int gp = 0; gp < 4; ++gp) {
    const double xi = kGp[gp].xi, eta = kGp[gp].eta;
    double gx[4], gy[4];
    for (int a = 0; a < 4; ++a) {
      gx[a] = dshape_dxi(a, eta) * sx;
      gy[a] = dshape_deta(a, xi) * sy;
    }
    const double w = coef_g[gp] * jac;
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) ke[a][b] += w * (gx[a] * gx[b] + gy[a] * gy[b]);
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < a; ++b) ke[a][b] = ke[b][a];
}

// Global dof of element corner c (or -1 on the boundary).
inline int corner_dof(const Grid2d& g, int e1, int e2, int c) {
  const int i = e1 + (c & 1);
  const int j = e2 + (c >> 1);
  if (i < 1 || i > g.nx || j < 1 || j > g.ny) return -1;
  return g.dof(i, j);
}

}  // namespace

BandMatrix assemble_stiffness_2d(const Grid2d& grid, const ScalarField2d& coef,
                                 bool require_positive) {
  BandMatrix m(grid.n, grid.half_bandwidth());
  double ke[4][4];
  double cg[4];
  for (int e2 = 0; e2 < grid.ky; ++e2) {
    for (int e1 = 0; e1 < grid.kx; ++e1) {
      const double x0 = e1 * grid.hx, y0 = e2 * grid.hy;
      for (int gp = 0; gp < 4; ++gp) {
        const double z1 = x0 + 0.5 * grid.hx * (1.0 + kGp[gp].xi);
        const double z2 = y0 + 0.5 * grid.hy * (1.0 + kGp[gp].eta);
        cg[gp] = coef(z1, z2);
        if (require_positive && !(cg[gp] > 0.0))
          throw EvaluationError("non-elliptic coefficient in 2D assembly");
      }
      local_stiffness(grid, cg, ke);
      int dofs[4];
      for (int c = 0; c < 4; ++c) dofs[c] = corner_dof(grid, e1, e2, c);
      for (int a = 0; a < 4; ++a) {
        if (dofs[a] < 0) continue;
        for (int b = 0; b < 4; ++b) {
          if (dofs[b] < 0 || dofs[b] < dofs[a]) continue;
          m.at(dofs[a], dofs[b]) += ke[a][b];
        }
      }
    }
  }
  return m;
}

std::vector<double> assemble_load_2d(const Grid2d& grid,
                                     const ScalarField2d& forcing) {
  std::vector<double> load(static_cast<std::size_t>(grid.n), 0.0);
  const double jac = 0.25 * grid.hx * grid.hy;
  for (int e2 = 0; e2 < grid.ky; ++e2) {
    for (int e1 = 0; e1 < grid.kx; ++e1) {
      const double x0 = e1 * grid.hx, y0 = e2 * grid.hy;
      for (int gp = 0; gp < 4; ++gp) {
        const double xi = kGp[gp].xi, eta = kGp[gp].eta;
        const double z1 = x0 + 0.5 * grid.hx * (1.0 + xi);
        const double z2 = y0 + 0.5 * grid.hy * (1.0 + eta);
        const double w = forcing(z1, z2) * jac;
        for (int a = 0; a < 4; ++a) {
          const int dof = corner_dof(grid, e1, e2, a);
          if (dof >= 0) load[static_cast<std::size_t>(dof)] += w * shape(a, xi, eta);
        }
      }
    }
  }
  return load;
}

std::vector<double> fem_solve_2d(const MultiIndex& alpha,
                                 const ScalarField2d& coef,
                                 const ScalarField2d& forcing) {
  const Grid2d grid = Grid2d::at_level(alpha);
  if (grid.n == 0) return {};
  // Band storage grows as n * bandwidth; beyond ~32M entries fall back to
  // the matrix-free CG.
  const std::size_t band_entries =
      static_cast<std::size_t>(grid.n) * (grid.half_bandwidth() + 1);
  if (band_entries > (std::size_t{1} << 22))
    return fem_solve_2d_cg(grid, coef, forcing);
  BandMatrix m = assemble_stiffness_2d(grid, coef);
  m.cholesky_in_place();
  return m.solve(assemble_load_2d(grid, forcing));
}

std::vector<double> fem_solve_2d_cg(const Grid2d& grid,
                                    const ScalarField2d& coef,
                                    const ScalarField2d& forcing,
                                    double tol, int max_iter) {
  const int n = grid.n;
  if (n == 0) return {};
  const int n_elem = grid.kx * grid.ky;
  // Coefficient at the Gauss points of every element, cached once.
  std::vector<double> cg(static_cast<std::size_t>(n_elem) * 4);
  for (int e2 = 0; e2 < grid.ky; ++e2) {
    for (int e1 = 0; e1 < grid.kx; ++e1) {
      const double x0 = e1 * grid.hx, y0 = e2 * grid.hy;
      for (int gp = 0; gp < 4; ++gp) {
        const double z1 = x0 + 0.5 * grid.hx * (1.0 + kGp[gp].xi);
        const double z2 = y0 + 0.5 * grid.hy * (1.0 + kGp[gp].eta);
        const double a = coef(z1, z2);
        if (!(a > 0.0))
          throw EvaluationError("non-elliptic coefficient in 2D assembly");
        cg[static_cast<std::size_t>(e2 * grid.kx + e1) * 4 + gp] = a;
      }
    }
  }

  auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    double ke[4][4];
    for (int e2 = 0; e2 < grid.ky; ++e2) {
      for (int e1 = 0; e1 < grid.kx; ++e1) {
        local_stiffness(grid, &cg[static_cast<std::size_t>(e2 * grid.kx + e1) * 4], ke);
        int dofs[4];
        double ue[4];
        for (int c = 0; c < 4; ++c) {
          dofs[c] = corner_dof(grid, e1, e2, c);
          ue[c] = dofs[c] >= 0 ? u[static_cast<std::size_t>(dofs[c])] : 0.0;
        }
        for (int a = 0; a < 4; ++a) {
          if (dofs[a] < 0) continue;
          double s = 0.0;
          for (int b = 0; b < 4; ++b) s += ke[a][b] * ue[b];
          out[static_cast<std::size_t>(dofs[a])] += s;
        }
      }
    }
  };

  // Jacobi preconditioner from the assembled diagonal.
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  {
    double ke[4][4];
    for (int e2 = 0; e2 < grid.ky; ++e2) {
      for (int e1 = 0; e1 < grid.kx; ++e1) {
        local_stiffness(grid, &cg[static_cast<std::size_t>(e2 * grid.kx + e1) * 4], ke);
        for (int a = 0; a < 4; ++a) {
          const int dof = corner_dof(grid, e1, e2, a);
          if (dof >= 0) diag[static_cast<std::size_t>(dof)] += ke[a][a];
        }
      }
    }
  }

  const std::vector<double> b = assemble_load_2d(grid, forcing);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> r = b;
  std::vector<double> z(static_cast<std::size_t>(n));
  std::vector<double> p(static_cast<std::size_t>(n));
  std::vector<double> ap(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] / diag[static_cast<std::size_t>(i)];
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];

  if (max_iter <= 0) max_iter = 40 * (grid.kx + grid.ky) + 200;
  double rnorm = bnorm;
  for (int it = 0; it < max_iter; ++it) {
    apply(p, ap);
    double pap = 0.0;
    for (int i = 0; i < n; ++i) pap += p[static_cast<std::size_t>(i)] * ap[static_cast<std::size_t>(i)];
    const double alpha_step = rz / pap;
    rnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] += alpha_step * p[static_cast<std::size_t>(i)];
      r[static_cast<std::size_t>(i)] -= alpha_step * ap[static_cast<std::size_t>(i)];
      rnorm += r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    }
    rnorm = std::sqrt(rnorm);
    if (rnorm <= tol * bnorm) return x;
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) {
      z[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] / diag[static_cast<std::size_t>(i)];
      rz_new += r[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(i)];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i)
      p[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
  }
  throw EvaluationError("CG did not reach relative residual " + std::to_string(tol) +
                        " (final " + std::to_string(rnorm / bnorm) + ")");
}

InterpWeights2d interp_weights_2d(const Grid2d& grid, double z1, double z2) {
  InterpWeights2d iw{};
  int c1 = static_cast<int>(z1 / grid.hx);
  int c2 = static_cast<int>(z2 / grid.hy);
  c1 = std::clamp(c1, 0, grid.kx - 1);
  c2 = std::clamp(c2, 0, grid.ky - 1);
  const double t1 = (z1 - c1 * grid.hx) / grid.hx;
  const double t2 = (z2 - c2 * grid.hy) / grid.hy;
  const double w1[2] = {1.0 - t1, t1};
  const double w2[2] = {1.0 - t2, t2};
  for (int c = 0; c < 4; ++c) {
    const int i = c1 + (c & 1);
    const int j = c2 + (c >> 1);
    iw.dofs[c] = (i < 1 || i > grid.nx || j < 1 || j > grid.ny) ? -1 : grid.dof(i, j);
    iw.w[c] = w1[c & 1] * w2[c >> 1];
  }
  return iw;
}

double interp_bilinear_2d(const Grid2d& grid, const std::vector<double>& u,
                          double z1, double z2) {
  if (z1 <= 0.0 || z1 >= 1.0 || z2 <= 0.0 || z2 >= 1.0) return 0.0;
  const InterpWeights2d iw = interp_weights_2d(grid, z1, z2);
  double s = 0.0;
  for (int c = 0; c < 4; ++c)
    if (iw.dofs[c] >= 0) s += iw.w[c] * u[static_cast<std::size_t>(iw.dofs[c])];
  return s;
}

}  // namespace mismc
