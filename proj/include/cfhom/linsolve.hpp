#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cfhom/geometry.hpp"

namespace cfhom {

using DiffusionTensor = std::array<std::array<double, 3>, 3>;

DiffusionTensor identity_tensor();

/// Row-compressed symmetric operator over the fluid degrees of freedom of a grid.
struct SparseOperator {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::int64_t> col;
  std::vector<double> val;
  std::vector<double> diag;

  /// y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  /// Stored entry (i, j), 0 when absent.
  double entry(std::size_t i, std::size_t j) const;
};

/// Discrete −Δ on fluid voxels: coupling 1/h² across every fluid-fluid face,
/// nothing across faces to solid voxels or ∂Ω (homogeneous Neumann). Periodic
/// grids wrap around.
SparseOperator assemble_neumann_laplacian(const PerforatedGrid& grid);

/// Discrete −∇·(A∇) for a symmetric positive definite tensor. Diagonal entries of A
/// use the face stencil; off-diagonal entries couple 2×2 voxel blocks through the
/// block-averaged gradients, which keeps the operator symmetric and
/// row-sum-free. With a diagonal A this reduces to the scaled face stencil
/// of assemble_neumann_laplacian, entry for entry.
SparseOperator assemble_tensor_diffusion(const PerforatedGrid& grid, const DiffusionTensor& A);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 20000;
  bool keep_history = false;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // ‖b − Mx‖₂ / ‖b‖₂
  /// Preconditioner-weighted residual norm per iteration; nonincreasing.
  std::vector<double> history;
};

/// Solves (shift·I + scale·op) x = rhs with Jacobi-preconditioned conjugate
/// residuals. With shift == 0 the operator is treated as a pure-Neumann one: the
/// right-hand side and every iterate are projected onto zero-mean fields, and
/// the returned solution has zero mean. `x0` is an optional initial guess.
/// Throws ConvergenceError when max_iter is exhausted.
SolveResult solve_spd(const SparseOperator& op, double shift, double scale,
                      std::span<const double> rhs, const SolveOptions& options = {},
                      std::span<const double> x0 = {});

}  // namespace cfhom
