#pragma once

#include "cfhom/cellproblem.hpp"
#include "cfhom/geometry.hpp"
#include "cfhom/kernels.hpp"
#include "cfhom/source.hpp"
#include "cfhom/stepper.hpp"

namespace cfhom {

/// Effective data of the homogenized system.
struct HomogenizedCoefficients {
  int dim = 2;
  DiffusionTensor A = identity_tensor();
  double theta = 1.0;
  BoundarySource psi;
  /// ∫_Γ q(y) dσ(y) over the reference-cell hole boundary.
  double gamma_q_integral = 0.0;

  /// ∫_Γ ψ(t, x, y) dσ(y)
  double gamma_source(double t, const Point& x) const {
    return psi.g(t) * psi.p(x) * gamma_q_integral;
  }
};

HomogenizedCoefficients homogenized_coefficients(const CellSolution& cell_solution,
                                                 const PerforatedGrid& reference_cell,
                                                 const BoundarySource& psi);

struct MacroProblem {
  int dim = 2;
  double L = 1.0;
  double h_macro = 1.0 / 64.0;
  KernelSet kernels{1};
  HomogenizedCoefficients coefficients;
  double U1 = 0.0;
  RunControls controls;
};

/// Unperforated Ω = [0,L]^dim with spacing h_macro (must divide L).
PerforatedGrid build_macro_grid(int dim, double L, double h_macro);

/// The homogenized equations carry θ on the time derivative and on every
/// reaction term, so after dividing by θ:
///   ∂_t u_i − (d_i/θ) ∇·(A∇u_i) = Q_i + F_i + [i = 1] d_1 ∫_Γψ dσ / θ.
/// The same splitting stepper as the perforated problem runs with diffusion
/// scale d_i/θ, dof weight θ h^dim (so audited mass is ∫ θ Σ i u_i) and the
/// source above.
SplitStepper make_macro_stepper(const PerforatedGrid& grid, const KernelSet& kernels,
                                const HomogenizedCoefficients& coefficients,
                                const RunControls& controls);

Trajectory run_macro(const MacroProblem& problem, const PerforatedGrid& grid);
Trajectory run_macro(const MacroProblem& problem);

}  // namespace cfhom
