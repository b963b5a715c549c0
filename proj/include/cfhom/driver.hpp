#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfhom/cellproblem.hpp"
#include "cfhom/config.hpp"
#include "cfhom/convergence.hpp"
#include "cfhom/kernels.hpp"
#include "cfhom/stepper.hpp"

namespace cfhom {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitNonConvergence = 4,
};

struct CellRun {
  PerforatedGrid cell;
  CellSolution solution;
};

CellRun run_cell(const RunConfig& config);

struct ConvergenceStudy {
  ConvergenceReport report;
  std::vector<std::vector<AuditRow>> micro_audits;  // per ε entry
  std::vector<AuditRow> macro_audit;
};

/// cell → macro → micro(ε list) → comparison. Independent ε runs use up to
/// `threads` workers; results do not depend on the worker count.
ConvergenceStudy run_convergence_study(const RunConfig& config, int threads = 1);

nlohmann::json to_json(const ValidationReport& report);
nlohmann::json cell_json(const RunConfig& config, const CellSolution& solution);
nlohmann::json report_json(const ConvergenceReport& report);

void write_snapshot_csv(const PerforatedGrid& grid, const Trajectory& traj, const Snapshot& snapshot,
                        std::ostream& os);
void write_audit_csv(const std::vector<AuditRow>& audit, std::ostream& os);
void write_report_csv(const ConvergenceReport& report, std::ostream& os);
void write_corrector_csv(const PerforatedGrid& cell, const CellSolution& solution, std::ostream& os);

struct CliOptions {
  int threads = 1;
  bool quiet = false;
};

/// Runs one subcommand (validate-kernels, cell, micro, macro, compare, zerod),
/// writing artifacts plus resolved_config.json into `out`. Returns the exit
/// code; numerical failures propagate as exceptions.
int orchestrate(const std::string& subcommand, const RunConfig& config,
                const std::filesystem::path& out, const CliOptions& options);

/// Full command line: parsing, dispatch, and mapping of failures to exit
/// codes with a JSON error document on stderr.
int run_command_line(int argc, char** argv);

}  // namespace cfhom
