#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cfhom/geometry.hpp"
#include "cfhom/kernels.hpp"
#include "cfhom/linsolve.hpp"

namespace cfhom {

struct MassLedger {
  double initial = 0.0;
  double injected = 0.0;  // boundary/source mass added so far
  double lost = 0.0;      // coagulation mass pushed past n_max so far
};

/// Concentrations u_i for i = 1..n_species on every degree of freedom,
/// stored species-major.
struct SpeciesState {
  double t = 0.0;
  int n_species = 0;
  std::size_t dofs = 0;
  std::vector<double> u;
  MassLedger ledger;

  std::span<double> species(int i) {
    return {u.data() + static_cast<std::size_t>(i - 1) * dofs, dofs};
  }
  std::span<const double> species(int i) const {
    return {u.data() + static_cast<std::size_t>(i - 1) * dofs, dofs};
  }
};

/// u_1 ≡ U1, u_i ≡ 0 for i ≥ 2, ledger zeroed except the initial mass.
SpeciesState init_state(std::size_t dofs, const KernelSet& kernels, double U1, double cell_weight);

/// Σ_i i Σ_c u_i(c) · cell_weight
double total_mass(const SpeciesState& state, double cell_weight);

/// Writes the monomer injection rate (concentration per unit time) per dof at time t.
using MonomerSource = std::function<void(double t, std::span<double> rate)>;

/// Lie splitting: explicit reaction, then backward-Euler diffusion per species
///   (I + dt·s_i·K) u_i^new = u_i + dt·[i = 1]·source(t + dt).
/// K is a symmetric Neumann operator, s_i the per-species diffusion scale and
/// cell_weight the volume attached to one dof in mass sums.
class SplitStepper {
 public:
  SplitStepper(const KernelSet& kernels, SparseOperator op, std::vector<double> diffusion_scale,
               double cell_weight, MonomerSource source, SolveOptions solve, int threads = 1);

  /// Advances by dt as 2^level equal substeps. The level rises whenever a
  /// substep would violate dt·max(Σ_j a(i,j) u_j + B(i)) ≤ 1/2 and never drops.
  /// Throws NumericalError if a concentration turns negative.
  void advance(SpeciesState& state, double dt);

  int level() const noexcept { return level_; }
  long solver_iterations() const noexcept { return solver_iterations_; }
  /// Accumulated Σ_substeps dt·Σ_c (Σ_i i u_i)²·cell_weight at substep ends.
  double duality_integral() const noexcept { return duality_; }
  double cell_weight() const noexcept { return cell_weight_; }
  long step_index() const noexcept { return steps_; }

 private:
  double max_depletion_rate(const SpeciesState& state);
  void react(SpeciesState& state, double dt);
  void diffuse(SpeciesState& state, double dt);

  const KernelSet& kernels_;
  SparseOperator op_;
  std::vector<double> scale_;
  double cell_weight_;
  MonomerSource source_;
  SolveOptions solve_;
  int threads_;
  int level_ = 0;
  long steps_ = 0;
  long solver_iterations_ = 0;
  double duality_ = 0.0;
  std::vector<double> rates_;      // species-major, filled by max_depletion_rate
  std::vector<double> mass_loss_;  // per dof
  std::vector<double> source_rate_;
};

struct RunControls {
  double T = 0.5;
  double dt = 0.01;
  int snapshot_stride = 10;
  SolveOptions solve{};
  double audit_tol = 1e-8;
  int threads = 1;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;  // species-major, like SpeciesState::u
};

struct AuditRow {
  double t = 0.0;
  double total_mass = 0.0;
  double injected = 0.0;
  double lost = 0.0;
  double residual = 0.0;  // relative mismatch of the mass balance
};

struct Trajectory {
  int n_species = 0;
  std::size_t dofs = 0;
  double cell_weight = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<AuditRow> audit;
  double duality = 0.0;
  std::vector<double> species_max;  // max over dofs and time, per species
  double min_value = 0.0;           // min over species, dofs and time
  double trace_max = 0.0;           // max of u_1 on dofs touching Γ (micro only)
  double max_audit_residual = 0.0;
  int level = 0;
  long steps = 0;
  long solver_iterations = 0;
  std::vector<std::string> warnings;

  std::span<const double> species(const Snapshot& s, int i) const {
    return {s.u.data() + static_cast<std::size_t>(i - 1) * dofs, dofs};
  }
};

/// Number of base steps T/dt; throws std::invalid_argument unless it is a
/// positive integer.
long step_count(const RunControls& controls);

/// Steps the state to T, auditing the mass balance after every step (throws
/// NumericalError with the step index on failure) and keeping a snapshot at
/// t = 0, every snapshot_stride steps and at T. `after_step` may observe the
/// state after each step.
Trajectory integrate(SplitStepper& stepper, SpeciesState state, const RunControls& controls,
                     const std::function<void(const SpeciesState&)>& after_step = {});

}  // namespace cfhom
