#include "cfhom/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cfhom/errors.hpp"
#include "cfhom/numerics.hpp"
#include "cfhom/reaction.hpp"

namespace cfhom {

SpeciesState init_state(std::size_t dofs, const KernelSet& kernels, double U1, double cell_weight) {
  if (!(U1 >= 0.0)) throw std::invalid_argument("U1 must be >= 0");
  SpeciesState s;
  s.n_species = kernels.n_max();
  s.dofs = dofs;
  s.u.assign(static_cast<std::size_t>(s.n_species) * dofs, 0.0);
  auto u1 = s.species(1);
  std::fill(u1.begin(), u1.end(), U1);
  s.ledger.initial = total_mass(s, cell_weight);
  return s;
}

double total_mass(const SpeciesState& s, double cell_weight) {
  CompensatedSum sum;
  for (int i = 1; i <= s.n_species; ++i) {
    CompensatedSum species;
    for (double v : s.species(i)) species.add(v);
    sum.add(i * species.value());
  }
  return sum.value() * cell_weight;
}

SplitStepper::SplitStepper(const KernelSet& kernels, SparseOperator op,
                           std::vector<double> diffusion_scale, double cell_weight,
                           MonomerSource source, SolveOptions solve, int threads)
    : kernels_(kernels),
      op_(std::move(op)),
      scale_(std::move(diffusion_scale)),
      cell_weight_(cell_weight),
      source_(std::move(source)),
      solve_(solve),
      threads_(std::max(1, threads)) {
  if (scale_.size() != static_cast<std::size_t>(kernels.n_max())) {
    throw std::invalid_argument("one diffusion scale per species required");
  }
  const auto n = static_cast<std::size_t>(kernels.n_max());
  rates_.assign(n * op_.n, 0.0);
  mass_loss_.assign(op_.n, 0.0);
  source_rate_.assign(op_.n, 0.0);
}

double SplitStepper::max_depletion_rate(const SpeciesState& s) {
  const int n = s.n_species;
  std::vector<double> u(static_cast<std::size_t>(n));
  std::vector<double> r(static_cast<std::size_t>(n));
  std::vector<double> depletion(static_cast<std::size_t>(n));
  double worst = 0.0;
  for (std::size_t c = 0; c < s.dofs; ++c) {
    for (int i = 0; i < n; ++i) u[i] = s.u[static_cast<std::size_t>(i) * s.dofs + c];
    mass_loss_[c] = reaction_rates(kernels_, u, r, depletion);
    for (int i = 0; i < n; ++i) {
      rates_[static_cast<std::size_t>(i) * s.dofs + c] = r[i];
      worst = std::max(worst, depletion[i]);
    }
  }
  return worst;
}

void SplitStepper::react(SpeciesState& s, double dt) {
  CompensatedSum lost;
  for (std::size_t c = 0; c < s.dofs; ++c) lost.add(mass_loss_[c]);
  s.ledger.lost += dt * lost.value() * cell_weight_;
  for (std::size_t k = 0; k < s.u.size(); ++k) {
    s.u[k] += dt * rates_[k];
    if (!(s.u[k] >= 0.0)) {
      std::ostringstream os;
      os << "negative concentration " << s.u[k] << " for size " << k / s.dofs + 1
         << " after the reaction substep at t = " << s.t << " (step " << steps_ << ")";
      throw NumericalError(os.str(), steps_);
    }
  }
}

void SplitStepper::diffuse(SpeciesState& s, double dt) {
  const double t_end = s.t + dt;
  if (source_) {
    source_(t_end, source_rate_);
    CompensatedSum injected;
    for (double r : source_rate_) injected.add(r);
    s.ledger.injected += dt * injected.value() * cell_weight_;
  }

  auto solve_species = [&](int i) -> long {
    auto u = s.species(i);
    std::vector<double> rhs(u.begin(), u.end());
    if (i == 1 && source_) {
      for (std::size_t c = 0; c < rhs.size(); ++c) rhs[c] += dt * source_rate_[c];
    }
    if (std::all_of(rhs.begin(), rhs.end(), [](double v) { return v == 0.0; })) {
      std::fill(u.begin(), u.end(), 0.0);
      return 0;
    }
    auto result = solve_spd(op_, 1.0, dt * scale_[static_cast<std::size_t>(i - 1)], rhs, solve_, rhs);
    std::copy(result.x.begin(), result.x.end(), u.begin());
    return result.iterations;
  };

  if (threads_ == 1) {
    for (int i = 1; i <= s.n_species; ++i) solver_iterations_ += solve_species(i);
  } else {
    std::vector<std::future<long>> pending;
    for (int w = 0; w < threads_; ++w) {
      pending.push_back(std::async(std::launch::async, [&, w] {
        long iterations = 0;
        for (int i = 1 + w; i <= s.n_species; i += threads_) iterations += solve_species(i);
        return iterations;
      }));
    }
    for (auto& f : pending) solver_iterations_ += f.get();
  }
  s.t = t_end;

  CompensatedSum rho2;
  for (std::size_t c = 0; c < s.dofs; ++c) {
    double rho = 0.0;
    for (int i = 1; i <= s.n_species; ++i) rho += i * s.u[static_cast<std::size_t>(i - 1) * s.dofs + c];
    rho2.add(rho * rho);
  }
  duality_ += dt * rho2.value() * cell_weight_;
}

void SplitStepper::advance(SpeciesState& s, double dt) {
  const double t0 = s.t;
  long done = 0;
  long total = 1L << level_;
  while (done < total) {
    double sub = dt / static_cast<double>(total);
    const double worst = max_depletion_rate(s);
    while (sub * worst > 0.5) {
      if (level_ >= 40) {
        throw NumericalError("time step underflow while enforcing the positivity bound", steps_);
      }
      ++level_;
      done *= 2;
      total *= 2;
      sub *= 0.5;
    }
    react(s, sub);
    diffuse(s, sub);
    ++done;
    // Substep times are reconstructed from the base step to avoid drift.
    s.t = t0 + dt * static_cast<double>(done) / static_cast<double>(total);
  }
  ++steps_;
}

long step_count(const RunControls& c) {
  if (!(c.T > 0.0) || !(c.dt > 0.0)) throw std::invalid_argument("T and dt must be > 0");
  const double q = c.T / c.dt;
  const double r = std::round(q);
  if (r < 1.0 || std::abs(q - r) > 1e-9 * r) throw std::invalid_argument("dt must divide T");
  if (c.snapshot_stride < 1) throw std::invalid_argument("snapshot_stride must be >= 1");
  return static_cast<long>(r);
}

Trajectory integrate(SplitStepper& stepper, SpeciesState state, const RunControls& controls,
                     const std::function<void(const SpeciesState&)>& after_step) {
  const long steps = step_count(controls);
  const double w = stepper.cell_weight();
  Trajectory traj;
  traj.n_species = state.n_species;
  traj.dofs = state.dofs;
  traj.cell_weight = w;
  traj.species_max.assign(static_cast<std::size_t>(state.n_species), 0.0);
  traj.min_value = std::numeric_limits<double>::infinity();

  auto observe = [&](const SpeciesState& s) {
    for (int i = 1; i <= s.n_species; ++i) {
      for (double v : s.species(i)) {
        traj.species_max[i - 1] = std::max(traj.species_max[i - 1], v);
        traj.min_value = std::min(traj.min_value, v);
      }
    }
  };
  auto audit = [&](const SpeciesState& s, long step) {
    AuditRow row;
    row.t = s.t;
    row.total_mass = total_mass(s, w);
    row.injected = s.ledger.injected;
    row.lost = s.ledger.lost;
    const double expected = s.ledger.initial + s.ledger.injected - s.ledger.lost;
    const double scale = std::max({std::abs(expected), std::abs(row.total_mass),
                                   std::abs(s.ledger.initial) + std::abs(s.ledger.injected)});
    row.residual = scale > 0.0 ? std::abs(row.total_mass - expected) / scale : 0.0;
    traj.audit.push_back(row);
    traj.max_audit_residual = std::max(traj.max_audit_residual, row.residual);
    if (row.residual > controls.audit_tol) {
      std::ostringstream os;
      os << "mass audit failed at step " << step << " (t = " << s.t
         << "): relative residual " << row.residual << " > " << controls.audit_tol;
      throw NumericalError(os.str(), step);
    }
  };

  observe(state);
  audit(state, 0);
  traj.snapshots.push_back({state.t, state.u});
  if (after_step) after_step(state);
  for (long step = 1; step <= steps; ++step) {
    stepper.advance(state, controls.dt);
    state.t = step * controls.dt;
    observe(state);
    audit(state, step);
    if (after_step) after_step(state);
    if (step % controls.snapshot_stride == 0 || step == steps) {
      traj.snapshots.push_back({state.t, state.u});
    }
  }
  traj.duality = stepper.duality_integral();
  traj.level = stepper.level();
  traj.steps = steps;
  traj.solver_iterations = stepper.solver_iterations();
  return traj;
}

}  // namespace cfhom
