#include "cfhom/macrosolver.hpp"

#include <cmath>
#include <stdexcept>

#include "cfhom/microsolver.hpp"

namespace cfhom {

HomogenizedCoefficients homogenized_coefficients(const CellSolution& cell_solution,
                                                 const PerforatedGrid& reference_cell,
                                                 const BoundarySource& psi) {
  HomogenizedCoefficients c;
  c.dim = cell_solution.dim;
  c.A = cell_solution.A;
  c.theta = cell_solution.theta;
  c.psi = psi;
  c.gamma_q_integral = boundary_integral(reference_cell, psi.q);
  return c;
}

PerforatedGrid build_macro_grid(int dim, double L, double h_macro) {
  if (!(L > 0.0) || !(h_macro > 0.0)) throw std::invalid_argument("L and h_macro must be > 0");
  const double q = L / h_macro;
  const double n = std::round(q);
  if (n < 1.0 || std::abs(q - n) > 1e-9 * n) throw std::invalid_argument("h_macro must divide L");
  const int cells = static_cast<int>(n);
  return build_box_grid(dim, {cells, cells, cells}, L / cells);
}

SplitStepper make_macro_stepper(const PerforatedGrid& grid, const KernelSet& kernels,
                                const HomogenizedCoefficients& coeffs,
                                const RunControls& controls) {
  if (!(coeffs.theta > 0.0 && coeffs.theta <= 1.0)) {
    throw std::invalid_argument("theta must lie in (0,1]");
  }
  const double theta = coeffs.theta;
  std::vector<double> scale;
  for (double d : kernels.diffusion()) scale.push_back(d / theta);

  MonomerSource source;
  if (coeffs.gamma_q_integral != 0.0) {
    std::vector<Point> centers;
    for (auto v : grid.voxel_of_dof) centers.push_back(grid.center(v));
    const double d1 = kernels.d(1);
    source = [centers = std::move(centers), coeffs, d1, theta](double t, std::span<double> rate) {
      for (std::size_t c = 0; c < centers.size(); ++c) {
        rate[c] = d1 * coeffs.gamma_source(t, centers[c]) / theta;
      }
    };
  }
  return SplitStepper(kernels, assemble_tensor_diffusion(grid, coeffs.A), std::move(scale),
                      theta * grid.voxel_volume(), std::move(source), controls.solve,
                      controls.threads);
}

Trajectory run_macro(const MacroProblem& problem, const PerforatedGrid& grid) {
  auto stepper = make_macro_stepper(grid, problem.kernels, problem.coefficients, problem.controls);
  auto state = init_state(grid.dof_count(), problem.kernels, problem.U1,
                          problem.coefficients.theta * grid.voxel_volume());
  auto traj = integrate(stepper, std::move(state), problem.controls);
  if (auto w = check_initial_datum(problem.U1, problem.coefficients.psi, problem.controls.T)) {
    traj.warnings.push_back(*w);
  }
  return traj;
}

Trajectory run_macro(const MacroProblem& problem) {
  return run_macro(problem, build_macro_grid(problem.dim, problem.L, problem.h_macro));
}

}  // namespace cfhom
