#include "cfhom/microsolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cfhom/linsolve.hpp"

namespace cfhom {

std::optional<std::string> check_initial_datum(double U1, const BoundarySource& psi, double T) {
  const double bound = psi.sup_norm(T);
  if (U1 > bound) {
    std::ostringstream os;
    os << "U1 = " << U1 << " exceeds the flux bound sup|psi| <= " << bound
       << "; the run proceeds but the a priori bounds do not apply";
    return os.str();
  }
  return std::nullopt;
}

MonomerSource micro_boundary_source(const PerforatedGrid& grid, const BoundarySource& psi,
                                    double d1) {
  struct FaceSample {
    std::size_t dof;
    Point x;
    Point y;
  };
  std::vector<FaceSample> faces;
  faces.reserve(grid.gamma_faces.size());
  for (const auto& f : grid.gamma_faces) {
    FaceSample s{static_cast<std::size_t>(grid.dof_of_voxel[f.voxel]), f.center, {0.0, 0.0, 0.0}};
    for (int d = 0; d < grid.dim; ++d) {
      const double s_d = f.center[d] / grid.epsilon;
      s.y[d] = s_d - std::floor(s_d);
    }
    faces.push_back(s);
  }
  const double factor = d1 * grid.epsilon * grid.face_measure() / grid.voxel_volume();
  return [faces = std::move(faces), psi, factor](double t, std::span<double> rate) {
    std::fill(rate.begin(), rate.end(), 0.0);
    const double g = psi.g(t);
    if (g == 0.0) return;
    for (const auto& f : faces) rate[f.dof] += factor * g * psi.p(f.x) * psi.q(f.y);
  };
}

SplitStepper make_micro_stepper(const PerforatedGrid& grid, const KernelSet& kernels,
                                const BoundarySource& psi, const RunControls& controls) {
  std::vector<double> scale(kernels.diffusion().begin(), kernels.diffusion().end());
  MonomerSource source;
  if (!grid.gamma_faces.empty()) source = micro_boundary_source(grid, psi, kernels.d(1));
  return SplitStepper(kernels, assemble_neumann_laplacian(grid), std::move(scale),
                      grid.voxel_volume(), std::move(source), controls.solve, controls.threads);
}

Trajectory run_micro(const MicroProblem& problem, const PerforatedGrid& grid) {
  auto stepper = make_micro_stepper(grid, problem.kernels, problem.psi, problem.controls);
  auto state = init_state(grid.dof_count(), problem.kernels, problem.U1, grid.voxel_volume());

  // Dofs adjacent to Γ, for the trace monitor.
  std::vector<std::size_t> trace_dofs;
  for (const auto& f : grid.gamma_faces) {
    trace_dofs.push_back(static_cast<std::size_t>(grid.dof_of_voxel[f.voxel]));
  }
  std::sort(trace_dofs.begin(), trace_dofs.end());
  trace_dofs.erase(std::unique(trace_dofs.begin(), trace_dofs.end()), trace_dofs.end());
  double trace = 0.0;
  auto monitor = [&](const SpeciesState& s) {
    const auto u1 = s.species(1);
    for (auto c : trace_dofs) trace = std::max(trace, u1[c]);
  };

  auto traj = integrate(stepper, std::move(state), problem.controls, monitor);
  traj.trace_max = trace;
  if (auto w = check_initial_datum(problem.U1, problem.psi, problem.controls.T)) {
    traj.warnings.push_back(*w);
  }
  return traj;
}

Trajectory run_micro(const MicroProblem& problem) {
  return run_micro(problem, build_perforated_grid(problem.domain));
}

std::vector<double> linf_bounds(const KernelSet& k, double U1, double trace) {
  const int n = k.n_max();
  std::vector<double> K(static_cast<std::size_t>(n), 0.0);
  K[0] = std::abs(U1) + trace + k.gamma(1) + 1.0;
  for (int i = 2; i <= n; ++i) {
    double s = 0.0;
    for (int j = 1; j < i; ++j) s += k.a(j, i - j) * K[j - 1] * K[i - j - 1];
    K[i - 1] = 1.0 + s / (k.B(i) + k.a(i, i)) + k.gamma(i);
  }
  return K;
}

ZeroDResult run_zerod(const KernelSet& kernels, std::vector<double> u0, double T, double dt,
                      int record_stride, const std::function<double(double)>& monomer_rate) {
  if (u0.size() != static_cast<std::size_t>(kernels.n_max())) {
    throw std::invalid_argument("initial vector length must equal n_max");
  }
  RunControls controls;
  controls.T = T;
  controls.dt = dt;
  controls.snapshot_stride = std::max(1, record_stride);
  const long steps = step_count(controls);

  const auto grid = build_box_grid(1, {1, 1, 1}, 1.0);
  MonomerSource source;
  if (monomer_rate) {
    source = [monomer_rate](double t, std::span<double> rate) { rate[0] = monomer_rate(t); };
  }
  SplitStepper stepper(kernels, assemble_neumann_laplacian(grid),
                       std::vector<double>(kernels.diffusion().begin(), kernels.diffusion().end()),
                       1.0, std::move(source), controls.solve);
  SpeciesState s;
  s.n_species = kernels.n_max();
  s.dofs = 1;
  s.u = std::move(u0);
  for (double v : s.u) {
    if (!(v >= 0.0)) throw std::invalid_argument("initial concentrations must be >= 0");
  }
  s.ledger.initial = total_mass(s, 1.0);

  ZeroDResult out;
  auto record = [&] {
    double number = 0.0;
    for (double v : s.u) number += v;
    out.t.push_back(s.t);
    out.number.push_back(number);
    out.mass.push_back(total_mass(s, 1.0));
    out.lost.push_back(s.ledger.lost);
  };
  record();
  for (long step = 1; step <= steps; ++step) {
    stepper.advance(s, dt);
    s.t = step * dt;
    if (step % controls.snapshot_stride == 0 || step == steps) record();
  }
  out.final_u = s.u;
  out.level = stepper.level();
  return out;
}

double constant_kernel_number(double N0, double a0, double t) {
  return N0 / (1.0 + 0.5 * a0 * N0 * t);
}

}  // namespace cfhom
