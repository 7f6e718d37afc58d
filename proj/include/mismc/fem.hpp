#pragma once

#include <functional>
#include <vector>

#include "mismc/multi_index.hpp"

namespace mismc {

// ---------------------------------------------------------------------------
// 1D piecewise-linear FEM on [0,1] with zero Dirichlet boundary.
// ---------------------------------------------------------------------------

struct Tridiag {
  std::vector<double> diag;  // size n
  std::vector<double> off;   // size n-1 (symmetric)
};

using ScalarField1d = std::function<double(double)>;

// Stiffness over the K-1 interior hat functions of a uniform mesh with K
// cells; entries from 2-point Gauss per cell. require_positive guards
// ellipticity of the coefficient at the quadrature points.
Tridiag assemble_stiffness_1d(int cells, const ScalarField1d& coef,
                              bool require_positive = true);

std::vector<double> assemble_load_1d(int cells, const ScalarField1d& forcing);

// Thomas algorithm for a symmetric tridiagonal SPD system.
std::vector<double> solve_tridiag(const Tridiag& m, std::vector<double> rhs);

// Interior nodal solution at level alpha (K = 2^alpha cells, needs K >= 2).
std::vector<double> fem_solve_1d(int level, const ScalarField1d& coef,
                                 const ScalarField1d& forcing);

// Piecewise-linear evaluation of an interior nodal vector (zero boundary).
double interp_nodal_1d(const std::vector<double>& u_interior, int cells, double z);

// ---------------------------------------------------------------------------
// 2D bilinear FEM on [0,1]^2 over a tensor grid, zero Dirichlet boundary.
// ---------------------------------------------------------------------------

struct Grid2d {
  int kx = 0, ky = 0;       // cells per direction
  double hx = 0.0, hy = 0.0;
  int nx = 0, ny = 0, n = 0;  // interior nodes per direction / total
  bool y_fast = false;      // dof ordering runs along the shorter direction

  static Grid2d make(int kx, int ky);
  static Grid2d at_level(const MultiIndex& alpha);  // kx = 2^a1, ky = 2^a2

  // Interior node (i, j), i in 1..kx-1, j in 1..ky-1.
  int dof(int i, int j) const {
    return y_fast ? (i - 1) * ny + (j - 1) : (j - 1) * nx + (i - 1);
  }
  int half_bandwidth() const { return y_fast ? ny + 1 : nx + 1; }
};

// Symmetric band matrix in upper storage: row i holds A[i][i..i+hbw].
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(int n, int half_bandwidth);

  int size() const { return n_; }
  int half_bandwidth() const { return hbw_; }
  double& at(int i, int j);        // requires i <= j <= i + hbw
  double at(int i, int j) const;
  std::vector<double>& values() { return a_; }
  const std::vector<double>& values() const { return a_; }

  // In-place Cholesky (A = U^T U); throws EvaluationError on a nonpositive
  // pivot. solve() afterwards performs the two triangular sweeps.
  void cholesky_in_place();
  std::vector<double> solve(std::vector<double> rhs) const;

  // Dense symmetric reconstruction; test support.
  std::vector<std::vector<double>> to_dense() const;

 private:
  int n_ = 0, hbw_ = 0;
  std::vector<double> a_;
};

using ScalarField2d = std::function<double(double, double)>;

// Stiffness for coefficient a(z) over bilinear tensor-product elements,
// 2x2 Gauss per element.
BandMatrix assemble_stiffness_2d(const Grid2d& grid, const ScalarField2d& coef,
                                 bool require_positive = true);

std::vector<double> assemble_load_2d(const Grid2d& grid,
                                     const ScalarField2d& forcing);

// Band-Cholesky solve of the assembled system. Grids whose band storage
// would be large are handled by the matrix-free CG below instead.
std::vector<double> fem_solve_2d(const MultiIndex& alpha,
                                 const ScalarField2d& coef,
                                 const ScalarField2d& forcing);

// Jacobi-preconditioned conjugate gradients with an element-wise matrix-free
// operator; relative residual target `tol`. Throws on non-convergence.
std::vector<double> fem_solve_2d_cg(const Grid2d& grid,
                                    const ScalarField2d& coef,
                                    const ScalarField2d& forcing,
                                    double tol = 1e-10, int max_iter = 0);

// Bilinear evaluation of an interior nodal vector (zero boundary).
double interp_bilinear_2d(const Grid2d& grid, const std::vector<double>& u,
                          double z1, double z2);

// Interpolation stencil (dofs may be -1 for boundary nodes, weight dropped).
struct InterpWeights2d {
  int dofs[4];
  double w[4];
};
InterpWeights2d interp_weights_2d(const Grid2d& grid, double z1, double z2);

}  // namespace mismc
