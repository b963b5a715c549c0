// Acceptance suite: one PASS/FAIL line per criterion. All tolerances and
// budgets are fixed here. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cfhom/cellproblem.hpp"
#include "cfhom/config.hpp"
#include "cfhom/convergence.hpp"
#include "cfhom/driver.hpp"
#include "cfhom/geometry.hpp"
#include "cfhom/kernels.hpp"
#include "cfhom/macrosolver.hpp"
#include "cfhom/microsolver.hpp"
#include "cfhom/reaction.hpp"

using namespace cfhom;

namespace {

constexpr double kIdentityTol = 1e-12;       // reaction and kernel identities
constexpr double kZeroDTol = 1e-3;           // N(T) against the closed form
constexpr double kCellIdentityTol = 1e-10;   // A = I, theta = 1 without hole
constexpr double kIsotropyTol = 1e-6;        // off-diagonal entries of A
constexpr double kPorosityTol = 0.01;        // theta against 1 - pi r^2
constexpr double kAuditTol = 1e-8;           // per-step mass balance
constexpr double kGammaSpread = 0.05;        // eps |Gamma_eps| variation
constexpr double kGammaExact = 1e-10;        // against the lattice perimeter
constexpr double kDualityRatio = 2.0;
constexpr double kEquivalenceTol = 1e-12;
constexpr double kBoundHeadroom = 1.1;
constexpr int kBoundSpecies = 8;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

RunConfig default_scenario() {
  RunConfig c = parse_config(nlohmann::json{{"schema_version", kSchemaVersion}});
  c.dim = 2;
  c.L = 1.0;
  c.epsilon = 0.125;
  c.epsilons = {0.25, 0.125, 0.0625};
  c.hole_radius = 0.25;
  c.m_cell = 16;
  c.h_macro = 1.0 / 128;
  c.kernels.n_max = 16;
  c.kernels.coagulation = "constant";
  c.kernels.a0 = 1.0;
  c.kernels.fragmentation = "binary_uniform";
  c.kernels.b = 0.5;
  c.U1 = 0.1;
  c.psi = BoundarySource{};  // t sin(pi x_1 / L), q = 1
  c.T = 0.5;
  c.dt = 0.01;
  c.snapshot_stride = 10;
  c.species = {1, 2, 3, 4};
  return c;
}

std::vector<KernelSet> builtin_families(int n) {
  return {build_builtin_kernels(ConstantCoagulation{1.0}, BinaryUniformFragmentation{0.5}, n, UniformDiffusion{1.0}),
          build_builtin_kernels(ConstantCoagulation{2.0}, NoFragmentation{}, n, UniformDiffusion{1.0}),
          build_builtin_kernels(SumPowerCoagulation{0.5}, BinaryUniformFragmentation{1.0}, n, UniformDiffusion{1.0}),
          build_builtin_kernels(SumPowerCoagulation{1.0}, BinaryUniformFragmentation{3.0}, n, UniformDiffusion{2.0})};
}

Outcome kernel_laws() {
  bool ok = true;
  double worst_daughter = 0.0;
  for (const auto& k : builtin_families(200)) {
    const int n = k.n_max();
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        ok &= k.a(i, j) == k.a(j, i);
        ok &= k.a(i, j) <= k.c_growth * std::pow(i + j, 1.0 - k.zeta) * (1 + kIdentityTol);
        if (j < i) ok &= k.B(i) * k.beta(i, j) <= k.gamma(j) * k.a(j, i) * (1 + kIdentityTol);
      }
      if (i >= 2) {
        double s = 0.0;
        for (int j = 1; j < i; ++j) s += j * k.beta(i, j);
        worst_daughter = std::max(worst_daughter, std::abs(s - i) / i);
      }
    }
    ok &= k.B(1) == 0.0;
    ok &= validate_kernels(k).ok();
  }
  ok &= worst_daughter <= kIdentityTol;
  return {ok, fmt("max daughter-mass rel. error %.2e", worst_daughter)};
}

Outcome reaction_identities() {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto families = builtin_families(64);
  double worst_f = 0, worst_q = 0, worst_w = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& k = families[static_cast<std::size_t>(trial) % families.size()];
    const int n = k.n_max();
    std::vector<double> u(n), phi(n);
    for (int i = 0; i < n; ++i) {
      u[i] = unif(rng) * std::exp(-0.05 * i);
      phi[i] = 2.0 * unif(rng) - 1.0;
    }
    const auto F = eval_fragmentation(k, u);
    double sum_f = 0.0, scale_f = 0.0;
    for (int i = 1; i <= n; ++i) {
      sum_f += i * F[i - 1];
      scale_f += i * k.B(i) * u[i - 1];
    }
    if (scale_f > 0) worst_f = std::max(worst_f, std::abs(sum_f) / scale_f);

    // independent double loop over ordered pairs
    const auto Q = eval_coagulation(k, u);
    std::vector<double> q_ref(n, 0.0), gross(n, 0.0);
    double lost_ref = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const double r = 0.5 * k.a(i, j) * u[i - 1] * u[j - 1];
        q_ref[i - 1] -= r;
        q_ref[j - 1] -= r;
        gross[i - 1] += r;
        gross[j - 1] += r;
        if (i + j <= n) {
          q_ref[i + j - 1] += r;
          gross[i + j - 1] += r;
        } else {
          lost_ref += (i + j) * r;
        }
      }
    double sum_q = 0.0, scale_q = 0.0;
    for (int i = 1; i <= n; ++i) {
      sum_q += i * Q.Q[i - 1];
      scale_q += i * std::abs(Q.Q[i - 1]);
      // entries are differences of gain and loss, so compare on the gross flux
      worst_q = std::max(worst_q, std::abs(Q.Q[i - 1] - q_ref[i - 1]) / gross[i - 1]);
    }
    worst_q = std::max(worst_q, std::abs(Q.mass_loss - lost_ref) / lost_ref);
    worst_q = std::max(worst_q, std::abs(sum_q + Q.mass_loss) / scale_q);

    const auto w = weak_form_check(k, u, phi);
    worst_w = std::max(worst_w, std::abs(w.coagulation_lhs - w.coagulation_rhs) /
                                    std::max(std::abs(w.coagulation_lhs), std::abs(w.coagulation_rhs)));
    worst_w = std::max(worst_w, std::abs(w.fragmentation_lhs - w.fragmentation_rhs) /
                                    std::max(std::abs(w.fragmentation_lhs), std::abs(w.fragmentation_rhs)));
  }
  const bool ok = worst_f <= kIdentityTol && worst_q <= kIdentityTol && worst_w <= kIdentityTol;
  return {ok, fmt("fragmentation mass %.2e, coagulation %.2e, weak form %.2e", worst_f, worst_q, worst_w)};
}

Outcome zerod_benchmark() {
  RunConfig c = default_scenario();
  const auto k = build_builtin_kernels(ConstantCoagulation{1.0}, NoFragmentation{}, 200, UniformDiffusion{1.0});
  std::vector<double> u0(200, 0.0);
  u0[0] = 1.0;
  const auto r = run_zerod(k, u0, 10.0, c.zerod.dt, 100);
  const double exact = 1.0 / (1.0 + 10.0 / 2.0);
  const double err = std::abs(r.number.back() - exact) / exact;
  return {err < kZeroDTol, fmt("N(10) = %.9f, closed form %.9f, rel. error %.2e", r.number.back(), exact, err)};
}

Outcome cell_problem() {
  bool ok = true;
  double worst_id = 0.0;
  for (int dim : {2, 3}) {
    const auto s = solve_cell_problem(build_reference_cell(dim, 0.0, 16));
    worst_id = std::max(worst_id, std::abs(s.theta - 1.0));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) worst_id = std::max(worst_id, std::abs(s.A[i][j] - (i == j ? 1.0 : 0.0)));
  }
  ok &= worst_id < kCellIdentityTol;
  std::vector<double> a;
  double theta64 = 0.0, offdiag = 0.0;
  for (int m : {32, 64, 128}) {
    const auto s = solve_cell_problem(build_reference_cell(2, 0.25, m));
    offdiag = std::max({offdiag, std::abs(s.A[0][1]), std::abs(s.A[1][0])});
    ok &= s.A[0][0] > 0.0 && s.A[0][0] < s.theta;
    if (m == 64) theta64 = s.theta;
    a.push_back(s.A[0][0]);
  }
  const double porosity = 1.0 - M_PI * 0.25 * 0.25;
  ok &= offdiag < kIsotropyTol;
  ok &= std::abs(theta64 - porosity) < kPorosityTol * porosity;
  ok &= std::abs(a[2] - a[1]) < std::abs(a[1] - a[0]);
  char buf[256];
  std::snprintf(buf, sizeof buf, "A11(32,64,128) = %.6f %.6f %.6f, theta(64) = %.5f, |A12| <= %.1e, r=0 error %.1e",
                a[0], a[1], a[2], theta64, offdiag, worst_id);
  return {ok, buf};
}

struct MicroRun {
  PerforatedGrid grid;
  Trajectory traj;
};

MicroRun default_micro() {
  const auto c = default_scenario();
  MicroProblem p{make_domain(c, c.epsilon), make_kernels(c.kernels), c.psi, c.U1, make_controls(c)};
  p.controls.audit_tol = kAuditTol;
  MicroRun run{build_perforated_grid(p.domain), {}};
  run.traj = run_micro(p, run.grid);
  return run;
}

Outcome micro_mass_audit(const MicroRun& run) {
  double worst = 0.0;
  for (const auto& row : run.traj.audit) {
    const double expected = run.traj.audit.front().total_mass + row.injected - row.lost;
    worst = std::max(worst, std::abs(row.total_mass - expected) / std::abs(expected));
  }
  const bool ok = worst < kAuditTol && run.traj.min_value >= 0.0 &&
                  run.traj.audit.size() == static_cast<std::size_t>(run.traj.steps) + 1;
  return {ok, fmt("%g steps, max residual %.2e, min value %.2e", static_cast<double>(run.traj.steps), worst,
                  run.traj.min_value)};
}

Outcome surface_measure() {
  const std::vector<DomainSpec> specs{{2, 1.0, 0.25, 0.25, 16}, {2, 1.0, 0.125, 0.25, 16}, {2, 1.0, 0.0625, 0.25, 16}};
  const auto entries = gamma_measure_limit_check(specs);
  // voxel perimeter of the reference disk by scanning neighbouring pairs
  const int m = 16;
  auto solid = [&](int i, int j) {
    i = (i + m) % m;
    j = (j + m) % m;
    const double x = (i + 0.5) / m - 0.5, y = (j + 0.5) / m - 0.5;
    return x * x + y * y < 0.25 * 0.25;
  };
  long faces = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) faces += (solid(i, j) != solid(i + 1, j)) + (solid(i, j) != solid(i, j + 1));
  const double expected = static_cast<double>(faces) / m;  // times |Omega| / |Y| = 1
  double lo = 1e300, hi = 0.0, exact = 0.0;
  for (const auto& e : entries) {
    lo = std::min(lo, e.scaled_gamma_area);
    hi = std::max(hi, e.scaled_gamma_area);
    exact = std::max(exact, std::abs(e.scaled_gamma_area - expected));
  }
  const bool ok = (hi - lo) / lo < kGammaSpread && exact < kGammaExact;
  return {ok, fmt("eps|Gamma| in [%.12f, %.12f], lattice perimeter %.12f", lo, hi, expected)};
}

Outcome convergence() {
  const auto study = run_convergence_study(default_scenario(), 1);
  const auto& r = study.report;
  bool ok = r.entries.size() == 3;
  std::string detail;
  for (std::size_t s = 0; s < r.species.size(); ++s) {
    const double first = r.entries.front().errors[s], last = r.entries.back().errors[s];
    ok &= r.strictly_decreasing(s) && last <= 0.5 * first;
    char buf[128];
    std::snprintf(buf, sizeof buf, "e_%d: %.3e > %.3e > %.3e; ", r.species[s], r.entries[0].errors[s],
                  r.entries[1].errors[s], r.entries[2].errors[s]);
    detail += buf;
  }
  ok &= r.duality_ratio() < kDualityRatio;
  detail += fmt("duality ratio %.4f", r.duality_ratio());
  return {ok, detail};
}

Outcome degenerate_equivalence() {
  auto c = default_scenario();
  c.hole_radius = 0.0;
  const auto kernels = make_kernels(c.kernels);
  const auto cell = run_cell(c);
  const auto coeffs = homogenized_coefficients(cell.solution, cell.cell, c.psi);
  MicroProblem micro{make_domain(c, c.epsilon), kernels, c.psi, c.U1, make_controls(c)};
  const auto grid = build_perforated_grid(micro.domain);
  const double h = grid.h;
  MacroProblem macro{c.dim, c.L, h, kernels, coeffs, c.U1, make_controls(c)};
  const auto a = run_micro(micro, grid);
  const auto b = run_macro(macro);
  double worst = 0.0;
  bool ok = a.snapshots.size() == b.snapshots.size() && coeffs.theta == 1.0;
  for (std::size_t k = 0; ok && k < a.snapshots.size(); ++k)
    for (std::size_t i = 0; i < a.snapshots[k].u.size(); ++i)
      worst = std::max(worst, std::abs(a.snapshots[k].u[i] - b.snapshots[k].u[i]));

  // same comparison from nonuniform data, so diffusion acts
  auto sm = make_micro_stepper(grid, kernels, c.psi, micro.controls);
  auto sM = make_macro_stepper(build_macro_grid(c.dim, c.L, h), kernels, coeffs, macro.controls);
  auto x = init_state(grid.dof_count(), kernels, 0.0, grid.voxel_volume());
  for (std::size_t i = 0; i < grid.dof_count(); ++i) {
    const auto p = grid.center(grid.voxel_of_dof[i]);
    x.species(1)[i] = 0.1 + 0.05 * std::cos(M_PI * p[0]) * std::cos(2 * M_PI * p[1]);
  }
  auto y = x;
  for (int step = 0; step < 20; ++step) {
    sm.advance(x, c.dt);
    sM.advance(y, c.dt);
    for (std::size_t i = 0; i < x.u.size(); ++i) worst = std::max(worst, std::abs(x.u[i] - y.u[i]));
  }
  ok &= worst <= kEquivalenceTol;
  return {ok, fmt("max field difference %.2e", worst)};
}

Outcome linf_monitor(const MicroRun& run) {
  const auto c = default_scenario();
  const auto bounds = linf_bounds(make_kernels(c.kernels), c.U1, run.traj.trace_max);
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < kBoundSpecies; ++i) {
    ok &= run.traj.species_max[i] <= kBoundHeadroom * bounds[i];
    worst = std::max(worst, run.traj.species_max[i] / bounds[i]);
  }
  return {ok, fmt("max u_i/K_i over i <= 8 is %.3e (u_1 max %.4f, K_1 %.4f)", worst, run.traj.species_max[0],
                  bounds[0])};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));
  auto wanted = [&](int id) { return selected.empty() || selected.count(id) > 0; };

  int failures = 0;
  MicroRun micro;
  bool have_micro = false;
  double micro_seconds = 0.0;
  auto report = [&](int id, const char* name, double budget, double seconds, const Outcome& o) {
    const bool pass = o.pass && seconds < budget;
    failures += !pass;
    std::printf("criterion %d %-26s %s  (%.1f s, budget %.0f s)  %s\n", id, name, pass ? "PASS" : "FAIL", seconds,
                budget, o.detail.c_str());
    std::fflush(stdout);
  };
  auto timed = [&](int id, const char* name, double budget, const std::function<Outcome()>& body) {
    if (!wanted(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(id, name, budget, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), o);
  };
  auto ensure_micro = [&] {
    if (have_micro) return;
    const auto t0 = std::chrono::steady_clock::now();
    micro = default_micro();
    micro_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    have_micro = true;
  };

  timed(1, "kernel laws", 1.0, kernel_laws);
  timed(2, "reaction identities", 10.0, reaction_identities);
  timed(3, "0-D constant kernel", 30.0, zerod_benchmark);
  timed(4, "cell problem", 120.0, cell_problem);
  timed(5, "micro mass audit", 300.0, [&] {
    ensure_micro();
    return micro_mass_audit(micro);
  });
  timed(6, "surface measure", 10.0, surface_measure);
  timed(7, "homogenization convergence", 1800.0, convergence);
  timed(8, "degenerate equivalence", 60.0, degenerate_equivalence);
  // runtime is amortized into the micro run of criterion 5
  timed(9, "L-infinity monitor", 300.0 - micro_seconds, [&] {
    ensure_micro();
    return linf_monitor(micro);
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
