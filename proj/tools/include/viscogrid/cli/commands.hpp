#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "viscogrid/cli/config.hpp"
#include "viscogrid/mgopt.hpp"

namespace viscogrid::cli {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBudget = 2;

/// One line of report.csv. Metrics without a reference are NaN.
struct ReportRow {
  int cycle = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double err_s = 0.0;
  double plug_flow = 0.0;
  double err_pf = 0.0;
  double alpha = 0.0;
  double wall_ms = 0.0;
};

const std::vector<std::string>& report_header();
std::vector<std::string> format_row(const ReportRow& row);

// ---------------------------------------------------------------------------
// Reference solutions
// ---------------------------------------------------------------------------

/// Canonical description of a reference problem; the cache file name is a
/// hash of it.
std::string reference_key(const ModelSpec& model, int finest, const SmootherConfig& smoother);
std::filesystem::path reference_path(const std::filesystem::path& dir, const std::string& key);

/// Reads ref_<hash>.txt from `dir` if present, otherwise runs
/// reference_solution and writes it. Progress goes to `log` when non-null.
NodalField load_or_compute_reference(const ModelSpec& model, const Discretization& disc, int finest,
                                     const SmootherConfig& smoother, const std::filesystem::path& dir,
                                     std::ostream* log = nullptr);

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct SolveResult {
  std::vector<ReportRow> rows;
  NodalField u;
  MeshLevel mesh;
  int exit_code = kExitError;
  std::string status;
  int finest_steps = 0;
};

/// Runs the configured mode without writing files.
SolveResult run_solve(const RunConfig& cfg, std::ostream* log = nullptr);

/// run_solve, then report.csv, solution.txt, mesh.txt in cfg.output and the
/// last row on `out`.
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct ExperimentOptions {
  std::filesystem::path output = ".";
  std::filesystem::path cache_dir;  ///< empty: same as output
  int max_descent_iterations = 3000;
};

/// Experiments 1-4; one CSV per table in options.output.
int cmd_experiment(int id, const ExperimentOptions& options, std::ostream& out, std::ostream& err);

/// Per-level node/triangle/boundary counts and area for `levels` levels.
int cmd_mesh_info(int levels, std::ostream& out, std::ostream& err);

}  // namespace viscogrid::cli
