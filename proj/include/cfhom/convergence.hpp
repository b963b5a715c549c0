#pragma once

#include <span>
#include <vector>

#include "cfhom/geometry.hpp"
#include "cfhom/linsolve.hpp"
#include "cfhom/stepper.hpp"

namespace cfhom {

/// Average over each ε-cell of the field extended by zero into the holes:
/// (Σ_{fluid voxels in cell} u·|voxel|) / ε^dim. `field` is dof-indexed.
/// Throws std::invalid_argument when the grid does not conform to the ε-lattice.
std::vector<double> cell_average(const PerforatedGrid& grid, std::span<const double> field);

/// Multilinear interpolation of a cell-centred field on an unperforated box
/// grid; constant extrapolation in the half cell next to ∂Ω.
double sample_field(const PerforatedGrid& box, std::span<const double> field, const Point& x);

/// e_i(ε) for each requested species:
///   e_i² = Σ_{snapshots t>0} Σ_{ε-cells} (avg_ε u_i^ε − θ u_i(centre))² ε^dim Δt
/// Throws std::invalid_argument when the snapshot times differ.
std::vector<double> compare(const Trajectory& micro, const PerforatedGrid& micro_grid,
                            const Trajectory& macro, const PerforatedGrid& macro_grid,
                            double theta, std::span<const int> species);

/// Space-time integral of (Σ_i i u_i)² over the fluid region, accumulated at
/// every substep of the run.
double duality_diagnostic(const Trajectory& trajectory);

struct EpsilonResult {
  double epsilon = 0.0;
  std::vector<double> errors;  // one per species in ConvergenceReport::species
  double duality = 0.0;
  double max_audit_residual = 0.0;
  double trace_max = 0.0;
  double min_value = 0.0;
  std::vector<double> species_max;
  long steps = 0;
  int level = 0;
  long solver_iterations = 0;
  std::size_t dofs = 0;
  std::size_t gamma_faces = 0;
};

struct ConvergenceReport {
  int dim = 2;
  double hole_radius = 0.0;
  int m_cell = 0;
  double theta = 1.0;
  DiffusionTensor A{};
  double gamma_q_integral = 0.0;
  std::vector<int> species;
  std::vector<EpsilonResult> entries;  // in the order the ε values were given
  double macro_max_audit_residual = 0.0;
  long macro_steps = 0;

  /// e_i strictly decreasing along the entries.
  bool strictly_decreasing(std::size_t species_slot) const;
  /// max/min of the duality diagnostic across entries.
  double duality_ratio() const;
};

}  // namespace cfhom
