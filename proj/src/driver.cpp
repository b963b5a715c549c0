#include "cfhom/driver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cfhom/errors.hpp"
#include "cfhom/macrosolver.hpp"
#include "cfhom/microsolver.hpp"

namespace cfhom {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json tensor_json(const DiffusionTensor& A, int dim) {
  json rows = json::array();
  for (int i = 0; i < dim; ++i) {
    json row = json::array();
    for (int j = 0; j < dim; ++j) row.push_back(A[i][j]);
    rows.push_back(row);
  }
  return rows;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto os = open_out(path);
  os << doc.dump(2) << '\n';
}

json trajectory_summary(const Trajectory& traj) {
  return {{"duality", traj.duality},
          {"species_max", traj.species_max},
          {"min_value", traj.min_value},
          {"max_audit_residual", traj.max_audit_residual},
          {"steps", traj.steps},
          {"substep_level", traj.level},
          {"solver_iterations", traj.solver_iterations},
          {"warnings", traj.warnings}};
}

void dump_trajectory(const std::filesystem::path& out, const PerforatedGrid& grid,
                     const Trajectory& traj, bool snapshots) {
  {
    auto os = open_out(out / "mass_audit.csv");
    write_audit_csv(traj.audit, os);
  }
  if (!snapshots) return;
  std::filesystem::create_directories(out / "snapshots");
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", k);
    auto os = open_out(out / "snapshots" / name);
    write_snapshot_csv(grid, traj, traj.snapshots[k], os);
  }
}

}  // namespace

CellRun run_cell(const RunConfig& config) {
  CellRun run{build_reference_cell(config.dim, config.hole_radius, config.m_cell), {}};
  SolveOptions options;
  options.tol = config.tol;
  options.max_iter = config.max_iter;
  run.solution = solve_cell_problem(run.cell, options);
  return run;
}

ConvergenceStudy run_convergence_study(const RunConfig& config, int threads) {
  const auto kernels = make_kernels(config.kernels);
  const auto controls = make_controls(config, 1);
  const auto cell = run_cell(config);
  const auto coeffs = homogenized_coefficients(cell.solution, cell.cell, config.psi);

  MacroProblem macro{config.dim, config.L, config.h_macro, kernels, coeffs, config.U1, controls};
  const auto macro_grid = build_macro_grid(config.dim, config.L, config.h_macro);
  const auto macro_traj = run_macro(macro, macro_grid);

  ConvergenceStudy study;
  auto& report = study.report;
  report.dim = config.dim;
  report.hole_radius = config.hole_radius;
  report.m_cell = config.m_cell;
  report.theta = coeffs.theta;
  report.A = coeffs.A;
  report.gamma_q_integral = coeffs.gamma_q_integral;
  report.species = config.species;
  report.macro_max_audit_residual = macro_traj.max_audit_residual;
  report.macro_steps = macro_traj.steps;
  study.macro_audit = macro_traj.audit;

  auto run_one = [&](double epsilon) {
    MicroProblem micro{make_domain(config, epsilon), kernels, config.psi, config.U1, controls};
    const auto grid = build_perforated_grid(micro.domain);
    const auto traj = run_micro(micro, grid);
    EpsilonResult r;
    r.epsilon = epsilon;
    r.errors = compare(traj, grid, macro_traj, macro_grid, coeffs.theta, config.species);
    r.duality = duality_diagnostic(traj);
    r.max_audit_residual = traj.max_audit_residual;
    r.trace_max = traj.trace_max;
    r.min_value = traj.min_value;
    r.species_max = traj.species_max;
    r.steps = traj.steps;
    r.level = traj.level;
    r.solver_iterations = traj.solver_iterations;
    r.dofs = grid.dof_count();
    r.gamma_faces = grid.gamma_faces.size();
    return std::make_pair(r, traj.audit);
  };

  std::vector<std::pair<EpsilonResult, std::vector<AuditRow>>> results;
  if (threads <= 1) {
    for (double e : config.epsilons) results.push_back(run_one(e));
  } else {
    std::vector<std::future<std::pair<EpsilonResult, std::vector<AuditRow>>>> pending;
    for (double e : config.epsilons) pending.push_back(std::async(std::launch::async, run_one, e));
    for (auto& f : pending) results.push_back(f.get());
  }
  for (auto& [entry, audit] : results) {
    report.entries.push_back(std::move(entry));
    study.micro_audits.push_back(std::move(audit));
  }
  return study;
}

json to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"constraint", v.constraint}, {"indices", v.indices}, {"detail", v.detail}});
  }
  return {{"ok", report.ok()}, {"violations", violations}};
}

json cell_json(const RunConfig& config, const CellSolution& s) {
  return {{"dim", s.dim},
          {"r", config.hole_radius},
          {"m_cell", config.m_cell},
          {"theta", s.theta},
          {"A", tensor_json(s.A, s.dim)},
          {"min_eigenvalue", min_eigenvalue(s.A, s.dim)},
          {"iterations", s.iterations},
          {"residuals", s.residuals}};
}

json report_json(const ConvergenceReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    json errors = json::object();
    for (std::size_t k = 0; k < r.species.size(); ++k) errors[std::to_string(r.species[k])] = e.errors[k];
    entries.push_back({{"epsilon", e.epsilon},
                       {"errors", errors},
                       {"duality", e.duality},
                       {"mass_residual", e.max_audit_residual},
                       {"trace_max", e.trace_max},
                       {"min_value", e.min_value},
                       {"species_max", e.species_max},
                       {"steps", e.steps},
                       {"substep_level", e.level},
                       {"solver_iterations", e.solver_iterations},
                       {"dofs", e.dofs},
                       {"gamma_faces", e.gamma_faces}});
  }
  json decreasing = json::object();
  json halved = json::object();
  bool all_ok = true;
  for (std::size_t k = 0; k < r.species.size(); ++k) {
    const bool dec = r.strictly_decreasing(k);
    const bool half = !r.entries.empty() &&
                      r.entries.back().errors[k] <= 0.5 * r.entries.front().errors[k];
    decreasing[std::to_string(r.species[k])] = dec;
    halved[std::to_string(r.species[k])] = half;
    all_ok = all_ok && dec && half;
  }
  const double ratio = r.duality_ratio();
  all_ok = all_ok && ratio < 2.0;
  json notes = json::array();
  if (!all_ok) {
    notes.push_back(
        "error sequence is not monotone or not halved; convergence is only guaranteed along "
        "a subsequence, so this may be a subsequence effect");
  }
  return {{"dim", r.dim},
          {"hole_radius", r.hole_radius},
          {"m_cell", r.m_cell},
          {"theta", r.theta},
          {"A", tensor_json(r.A, r.dim)},
          {"gamma_q_integral", r.gamma_q_integral},
          {"species", r.species},
          {"macro", {{"mass_residual", r.macro_max_audit_residual}, {"steps", r.macro_steps}}},
          {"entries", entries},
          {"checks",
           {{"strictly_decreasing", decreasing},
            {"halved", halved},
            {"duality_ratio", ratio},
            {"passed", all_ok}}},
          {"notes", notes}};
}

void write_snapshot_csv(const PerforatedGrid& grid, const Trajectory& traj, const Snapshot& snap,
                        std::ostream& os) {
  static const char* const kAxes[] = {"x", "y", "z"};
  os << "voxel";
  for (int d = 0; d < grid.dim; ++d) os << ',' << kAxes[d];
  for (int i = 1; i <= traj.n_species; ++i) os << ",u_" << i;
  os << '\n';
  for (std::size_t dof = 0; dof < grid.dof_count(); ++dof) {
    const auto v = grid.voxel_of_dof[dof];
    os << v;
    const auto p = grid.center(v);
    for (int d = 0; d < grid.dim; ++d) os << ',' << num(p[d]);
    for (int i = 1; i <= traj.n_species; ++i) os << ',' << num(traj.species(snap, i)[dof]);
    os << '\n';
  }
}

void write_audit_csv(const std::vector<AuditRow>& audit, std::ostream& os) {
  os << "t,total_mass,injected,lost,residual\n";
  for (const auto& r : audit) {
    os << num(r.t) << ',' << num(r.total_mass) << ',' << num(r.injected) << ',' << num(r.lost)
       << ',' << num(r.residual) << '\n';
  }
}

void write_report_csv(const ConvergenceReport& r, std::ostream& os) {
  os << "epsilon,species,error,duality,mass_residual\n";
  for (const auto& e : r.entries) {
    for (std::size_t k = 0; k < r.species.size(); ++k) {
      os << num(e.epsilon) << ',' << r.species[k] << ',' << num(e.errors[k]) << ','
         << num(e.duality) << ',' << num(e.max_audit_residual) << '\n';
    }
  }
}

void write_corrector_csv(const PerforatedGrid& cell, const CellSolution& s, std::ostream& os) {
  static const char* const kAxes[] = {"y1", "y2", "y3"};
  os << "voxel";
  for (int d = 0; d < cell.dim; ++d) os << ',' << kAxes[d];
  for (int j = 1; j <= s.dim; ++j) os << ",w_" << j;
  os << '\n';
  for (std::size_t dof = 0; dof < cell.dof_count(); ++dof) {
    const auto v = cell.voxel_of_dof[dof];
    os << v;
    const auto p = cell.center(v);
    for (int d = 0; d < cell.dim; ++d) os << ',' << num(p[d]);
    for (int j = 0; j < s.dim; ++j) os << ',' << num(s.w[j][dof]);
    os << '\n';
  }
}

int orchestrate(const std::string& sub, const RunConfig& config, const std::filesystem::path& out,
                const CliOptions& options) {
  std::filesystem::create_directories(out);
  write_json(out / "resolved_config.json", to_json(config));
  auto log = [&](const std::string& line) {
    if (!options.quiet) std::cerr << line << '\n';
  };
  auto show = [&](const json& doc) {
    if (!options.quiet) std::cout << doc.dump(2) << '\n';
  };

  if (sub == "validate-kernels") {
    const auto report = validate_kernels(make_kernels(config.kernels));
    const auto doc = to_json(report);
    write_json(out / "validation.json", doc);
    show(doc);
    return report.ok() ? kExitOk : kExitConfig;
  }

  if (sub == "cell") {
    const auto run = run_cell(config);
    const auto doc = cell_json(config, run.solution);
    write_json(out / "cell.json", doc);
    if (config.output.corrector_csv) {
      auto os = open_out(out / "corrector.csv");
      write_corrector_csv(run.cell, run.solution, os);
    }
    if (config.output.mask_csv) {
      auto os = open_out(out / "cell_mask.csv");
      write_mask_csv(run.cell, os);
    }
    show(doc);
    return kExitOk;
  }

  if (sub == "micro") {
    const auto kernels = make_kernels(config.kernels);
    MicroProblem problem{make_domain(config, config.epsilon), kernels, config.psi, config.U1,
                         make_controls(config, options.threads)};
    const auto grid = build_perforated_grid(problem.domain);
    if (config.output.mask_csv) {
      auto os = open_out(out / "mask.csv");
      write_mask_csv(grid, os);
    }
    log("micro: " + std::to_string(grid.dof_count()) + " fluid voxels, " +
        std::to_string(grid.gamma_faces.size()) + " boundary faces");
    const auto traj = run_micro(problem, grid);
    for (const auto& w : traj.warnings) log("warning: " + w);
    dump_trajectory(out, grid, traj, config.output.snapshots);
    auto summary = trajectory_summary(traj);
    summary["epsilon"] = config.epsilon;
    summary["fluid_volume"] = grid.fluid_volume;
    summary["gamma_area"] = grid.gamma_area;
    summary["trace_max"] = traj.trace_max;
    const auto bounds = linf_bounds(kernels, config.U1, traj.trace_max);
    bool within = true;
    for (std::size_t i = 0; i < bounds.size(); ++i) within = within && traj.species_max[i] <= 1.1 * bounds[i];
    summary["linf_bounds"] = bounds;
    summary["linf_within_bounds"] = within;
    write_json(out / "summary.json", summary);
    return kExitOk;
  }

  if (sub == "macro") {
    const auto kernels = make_kernels(config.kernels);
    const auto cell = run_cell(config);
    MacroProblem problem{config.dim, config.L, config.h_macro, kernels,
                         homogenized_coefficients(cell.solution, cell.cell, config.psi), config.U1,
                         make_controls(config, options.threads)};
    const auto grid = build_macro_grid(config.dim, config.L, config.h_macro);
    const auto traj = run_macro(problem, grid);
    for (const auto& w : traj.warnings) log("warning: " + w);
    dump_trajectory(out, grid, traj, config.output.snapshots);
    auto summary = trajectory_summary(traj);
    summary["theta"] = problem.coefficients.theta;
    summary["A"] = tensor_json(problem.coefficients.A, config.dim);
    summary["gamma_q_integral"] = problem.coefficients.gamma_q_integral;
    write_json(out / "summary.json", summary);
    return kExitOk;
  }

  if (sub == "compare") {
    const auto study = run_convergence_study(config, options.threads);
    const auto doc = report_json(study.report);
    write_json(out / "report.json", doc);
    {
      auto os = open_out(out / "report.csv");
      write_report_csv(study.report, os);
    }
    {
      auto os = open_out(out / "macro_mass_audit.csv");
      write_audit_csv(study.macro_audit, os);
    }
    for (std::size_t k = 0; k < study.micro_audits.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "micro_mass_audit_%zu.csv", k);
      auto os = open_out(out / name);
      write_audit_csv(study.micro_audits[k], os);
    }
    show(doc["checks"]);
    return kExitOk;
  }

  if (sub == "zerod") {
    auto kc = config.kernels;
    kc.n_max = config.zerod.n_max;
    if (kc.diffusion == "list") kc.d_values.resize(static_cast<std::size_t>(kc.n_max), kc.d0);
    const auto kernels = make_kernels(kc);
    std::vector<double> u0(static_cast<std::size_t>(kc.n_max), 0.0);
    u0[0] = config.zerod.N0;
    const auto result = run_zerod(kernels, u0, config.zerod.T, config.zerod.dt,
                                  config.zerod.record_stride);
    const bool closed_form = kc.coagulation == "constant" && kc.fragmentation == "none";
    auto os = open_out(out / "zerod.csv");
    os << "t,N,N_closed_form,mass,lost\n";
    for (std::size_t k = 0; k < result.t.size(); ++k) {
      os << num(result.t[k]) << ',' << num(result.number[k]) << ',';
      if (closed_form) os << num(constant_kernel_number(config.zerod.N0, kc.a0, result.t[k]));
      os << ',' << num(result.mass[k]) << ',' << num(result.lost[k]) << '\n';
    }
    json summary = {{"N_final", result.number.back()},
                    {"mass_final", result.mass.back()},
                    {"lost_final", result.lost.back()},
                    {"substep_level", result.level}};
    if (closed_form) {
      const double exact = constant_kernel_number(config.zerod.N0, kc.a0, config.zerod.T);
      summary["N_closed_form"] = exact;
      summary["relative_error"] = std::abs(result.number.back() - exact) / exact;
    }
    write_json(out / "zerod.json", summary);
    show(summary);
    return kExitOk;
  }

  throw ConfigError({"unknown subcommand '" + sub + "'"});
}

int run_command_line(int argc, char** argv) {
  CLI::App app{"Coagulation-fragmentation-diffusion on perforated domains and its homogenized limit"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  CliOptions options;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", options.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", options.quiet, "suppress progress output");
  app.fallthrough();
  for (const char* name : {"validate-kernels", "cell", "micro", "macro", "compare", "zerod"}) {
    app.add_subcommand(name);
  }

  auto fail = [](int code, const std::string& kind, const std::vector<std::string>& messages) {
    json doc = {{"error", kind}, {"exit_code", code}, {"messages", messages}};
    std::cerr << doc.dump() << '\n';
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "usage", {e.what()});
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    RunConfig config =
        config_path.empty() ? parse_config(json{{"schema_version", kSchemaVersion}}) : load_config(config_path);
    if (!out_dir.empty()) config.output.dir = out_dir;
    return orchestrate(sub, config, config.output.dir, options);
  } catch (const ConfigError& e) {
    return fail(kExitConfig, "config", e.problems());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, "config", {e.what()});
  } catch (const NumericalError& e) {
    return fail(kExitNumerical, "numerical", {e.what()});
  } catch (const ConvergenceError& e) {
    return fail(kExitNonConvergence, "non_convergence", {e.what()});
  } catch (const std::exception& e) {
    return fail(kExitNumerical, "internal", {e.what()});
  }
}

}  // namespace cfhom
