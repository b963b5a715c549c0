#include "cfhom/cellproblem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cfhom/numerics.hpp"

namespace cfhom {

std::vector<double> corrector_rhs(const PerforatedGrid& cell, int direction) {
  std::vector<double> b(cell.dof_count(), 0.0);
  for (std::size_t dof = 0; dof < cell.dof_count(); ++dof) {
    const auto v = cell.voxel_of_dof[dof];
    const auto up = cell.neighbor(v, direction, 1);
    const auto down = cell.neighbor(v, direction, -1);
    const double solid_down = (down >= 0 && !cell.fluid[down]) ? 1.0 : 0.0;
    const double solid_up = (up >= 0 && !cell.fluid[up]) ? 1.0 : 0.0;
    b[dof] = (solid_down - solid_up) / cell.h;
  }
  return b;
}

double corrector_energy_product(const PerforatedGrid& cell, std::span<const double> u,
                                std::span<const double> g, std::span<const double> v,
                                std::span<const double> f) {
  // Each fluid-fluid face carries the dual volume h^dim.
  CompensatedSum sum;
  for (std::size_t dof = 0; dof < cell.dof_count(); ++dof) {
    const auto vox = cell.voxel_of_dof[dof];
    for (int axis = 0; axis < cell.dim; ++axis) {
      const auto nb = cell.neighbor(vox, axis, 1);
      if (nb < 0 || nb == vox || !cell.fluid[nb]) continue;
      const auto nd = static_cast<std::size_t>(cell.dof_of_voxel[nb]);
      const double gu = (u[nd] - u[dof]) / cell.h + g[axis];
      const double gv = (v[nd] - v[dof]) / cell.h + f[axis];
      sum.add(gu * gv);
    }
  }
  return sum.value() * cell.voxel_volume();
}

double corrector_energy(const PerforatedGrid& cell, std::span<const double> field,
                        std::span<const double> macro_gradient) {
  return corrector_energy_product(cell, field, macro_gradient, field, macro_gradient);
}

CellSolution solve_cell_problem(const PerforatedGrid& cell, const SolveOptions& options) {
  if (cell.topology != Topology::kPeriodic) {
    throw std::invalid_argument("cell problem needs a periodic reference cell");
  }
  if (cell.dof_count() == 0 || count_fluid_components(cell) != 1) {
    throw std::invalid_argument("reference cell fluid region must be connected");
  }
  const auto op = assemble_neumann_laplacian(cell);
  CellSolution sol;
  sol.dim = cell.dim;
  sol.theta = cell.fluid_volume;
  for (int j = 0; j < cell.dim; ++j) {
    const auto rhs = corrector_rhs(cell, j);
    auto result = solve_spd(op, 0.0, 1.0, rhs, options);
    sol.iterations.push_back(result.iterations);
    sol.residuals.push_back(result.residual);
    sol.w.push_back(std::move(result.x));
  }
  for (int j = 0; j < cell.dim; ++j) {
    for (int k = j; k < cell.dim; ++k) {
      std::array<double, 3> ej{0.0, 0.0, 0.0};
      std::array<double, 3> ek{0.0, 0.0, 0.0};
      ej[j] = 1.0;
      ek[k] = 1.0;
      const double a = corrector_energy_product(cell, sol.w[j], ej, sol.w[k], ek);
      sol.A[j][k] = a;
      sol.A[k][j] = a;
    }
  }
  return sol;
}

std::vector<double> corrector_reconstruct(const CellSolution& sol,
                                          std::span<const double> macro_gradient) {
  if (macro_gradient.size() < static_cast<std::size_t>(sol.dim)) {
    throw std::invalid_argument("macro gradient needs one entry per dimension");
  }
  const std::size_t n = sol.w.empty() ? 0 : sol.w.front().size();
  std::vector<double> u(n, 0.0);
  for (int j = 0; j < sol.dim; ++j) {
    if (macro_gradient[j] == 0.0) continue;
    for (std::size_t c = 0; c < n; ++c) u[c] += macro_gradient[j] * sol.w[j][c];
  }
  return u;
}

double min_eigenvalue(const DiffusionTensor& A, int dim) {
  if (dim == 1) return A[0][0];
  if (dim == 2) {
    const double mean = 0.5 * (A[0][0] + A[1][1]);
    const double diff = 0.5 * (A[0][0] - A[1][1]);
    return mean - std::sqrt(diff * diff + A[0][1] * A[1][0]);
  }
  // Symmetric 3x3: trigonometric solution of the characteristic polynomial.
  const double p1 = A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2];
  const double q = (A[0][0] + A[1][1] + A[2][2]) / 3.0;
  if (p1 == 0.0) return std::min({A[0][0], A[1][1], A[2][2]});
  const double p2 = (A[0][0] - q) * (A[0][0] - q) + (A[1][1] - q) * (A[1][1] - q) +
                    (A[2][2] - q) * (A[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  DiffusionTensor Bm{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Bm[i][j] = (A[i][j] - (i == j ? q : 0.0)) / p;
  const double detB = Bm[0][0] * (Bm[1][1] * Bm[2][2] - Bm[1][2] * Bm[2][1]) -
                      Bm[0][1] * (Bm[1][0] * Bm[2][2] - Bm[1][2] * Bm[2][0]) +
                      Bm[0][2] * (Bm[1][0] * Bm[2][1] - Bm[1][1] * Bm[2][0]);
  const double r = std::clamp(detB / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
}

}  // namespace cfhom
