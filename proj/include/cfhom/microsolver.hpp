#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfhom/geometry.hpp"
#include "cfhom/kernels.hpp"
#include "cfhom/source.hpp"
#include "cfhom/stepper.hpp"

namespace cfhom {

/// The truncated coagulation-fragmentation-diffusion system on the perforated
/// domain, with flux ε·ψ(t, x, x/ε) for monomers on the hole boundaries.
struct MicroProblem {
  DomainSpec domain;
  KernelSet kernels{1};
  BoundarySource psi;
  double U1 = 0.0;
  RunControls controls;
};

/// Warning text when U1 exceeds the bound ‖ψ‖∞ required of the initial datum.
std::optional<std::string> check_initial_datum(double U1, const BoundarySource& psi, double T);

/// Injection rate per dof: d_1 · ε · ψ(t, x_f, x_f/ε) · |face| / |voxel| summed
/// over the Γ faces of each fluid voxel.
MonomerSource micro_boundary_source(const PerforatedGrid& grid, const BoundarySource& psi, double d1);

SplitStepper make_micro_stepper(const PerforatedGrid& grid, const KernelSet& kernels,
                                const BoundarySource& psi, const RunControls& controls);

Trajectory run_micro(const MicroProblem& problem, const PerforatedGrid& grid);
Trajectory run_micro(const MicroProblem& problem);

/// Bounds K_i on max u_i: K_1 = |U1| + trace + γ_1 + 1 with `trace` the sup of
/// u_1 on the hole boundaries, and for i ≥ 2
///   K_i = 1 + Σ_{j<i} a(j,i−j) K_j K_{i−j} / (B_i + a(i,i)) + γ_i.
std::vector<double> linf_bounds(const KernelSet& kernels, double U1, double trace);

/// Spatially homogeneous (0-D) run of the same splitting stepper on a single
/// voxel, so only the adaptive explicit reaction step acts.
struct ZeroDResult {
  std::vector<double> t;
  std::vector<double> number;  // N = Σ_i u_i
  std::vector<double> mass;    // Σ_i i u_i
  std::vector<double> lost;    // truncation loss ledger
  std::vector<double> final_u;
  int level = 0;
};

ZeroDResult run_zerod(const KernelSet& kernels, std::vector<double> u0, double T, double dt,
                      int record_stride = 1,
                      const std::function<double(double)>& monomer_rate = {});

/// N(t) for the constant kernel a0 and monomer-only data N0, no fragmentation.
double constant_kernel_number(double N0, double a0, double t);

}  // namespace cfhom
