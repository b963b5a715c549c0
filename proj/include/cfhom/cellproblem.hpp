#pragma once

#include <span>
#include <vector>

#include "cfhom/geometry.hpp"
#include "cfhom/linsolve.hpp"

namespace cfhom {

/// Correctors w_j on the fluid voxels of a periodic reference cell, the
/// effective tensor A_jk = ∫_{Y*} (∇w_j + e_j)·(∇w_k + e_k) and θ = |Y*|.
struct CellSolution {
  int dim = 2;
  std::vector<std::vector<double>> w;  // one zero-mean field per direction
  DiffusionTensor A{};
  double theta = 1.0;
  std::vector<int> iterations;
  std::vector<double> residuals;
};

/// Right-hand side of the discrete corrector equation K w_j = b_j: the
/// divergence of the constant field e_j restricted to Y*, which only lives on
/// voxels next to the hole.
std::vector<double> corrector_rhs(const PerforatedGrid& cell, int direction);

/// ∫_{Y*} |∇_h u + g|² with the face-based gradient of the diffusion operator.
double corrector_energy(const PerforatedGrid& cell, std::span<const double> field,
                        std::span<const double> macro_gradient);

/// ∫_{Y*} (∇_h u + g)·(∇_h v + f), same quadrature.
double corrector_energy_product(const PerforatedGrid& cell, std::span<const double> u,
                                std::span<const double> g, std::span<const double> v,
                                std::span<const double> f);

/// Requires a periodic, connected reference cell. Throws std::invalid_argument
/// otherwise and ConvergenceError if a corrector solve stalls.
CellSolution solve_cell_problem(const PerforatedGrid& cell, const SolveOptions& options = {});

/// u¹(y) = Σ_j g_j w_j(y).
std::vector<double> corrector_reconstruct(const CellSolution& solution,
                                          std::span<const double> macro_gradient);

/// Smallest eigenvalue of the leading dim×dim block (closed form for dim ≤ 3).
double min_eigenvalue(const DiffusionTensor& A, int dim);

}  // namespace cfhom
