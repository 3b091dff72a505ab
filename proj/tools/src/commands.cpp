#include "viscogrid/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "viscogrid/analytic.hpp"
#include "viscogrid/error.hpp"
#include "viscogrid/io.hpp"

namespace viscogrid::cli {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Err_s / plug-flow bookkeeping on the finest grid.
struct Metrics {
  const Discretization* disc = nullptr;
  RadialProfile profile;
  std::optional<NodalField> reference;

  void fill(const NodalField& u, ReportRow& row) const {
    row.plug_flow = plug_flow_numeric(u, disc->mesh());
    row.err_pf = err_pf(u, profile, disc->mesh());
    row.err_s = reference ? err_s(u, *reference, *disc) : kNaN;
  }
};

Metrics make_metrics(const RunConfig& cfg, const ModelSpec& model, const Discretization& disc, std::ostream* log) {
  Metrics m;
  m.disc = &disc;
  m.profile = RadialProfile::from_model(model);
  if (cfg.reference) {
    m.reference = load_or_compute_reference(model, disc, cfg.finest, cfg.mgopt_config().smoother, cfg.cache_path(), log);
  }
  return m;
}

int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return kExitConverged;
    case SolveStatus::iteration_budget: return kExitBudget;
    case SolveStatus::line_search_failure: return kExitError;
  }
  return kExitError;
}

ReportRow from_cycle(const CycleRecord& c) {
  return {c.cycle, c.energy, c.grad_norm, c.err_s, c.plug_flow, c.err_pf, c.alpha, c.wall_ms};
}

}  // namespace

const std::vector<std::string>& report_header() {
  static const std::vector<std::string> header = {"cycle",  "energy", "grad_norm", "err_s",
                                                  "plug_flow", "err_pf", "alpha",     "wall_ms"};
  return header;
}

std::vector<std::string> format_row(const ReportRow& r) {
  return {std::to_string(r.cycle), io::sci(r.energy), io::sci(r.grad_norm), io::sci(r.err_s),
          io::sci(r.plug_flow),    io::sci(r.err_pf), io::sci(r.alpha),     io::sci(r.wall_ms)};
}

SolveResult run_solve(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const ModelSpec model = cfg.model_spec();
  const MgoptConfig mg_cfg = cfg.mgopt_config();
  const MeshHierarchy hierarchy = MeshHierarchy::unit_disk(cfg.finest).finest_levels(cfg.levels);

  SolveResult result;
  result.mesh = hierarchy.finest();

  if (cfg.mode == Mode::descent) {
    const Discretization disc(hierarchy.finest());
    const Metrics metrics = make_metrics(cfg, model, disc, log);
    Smoother smoother(disc, model, mg_cfg.smoother);
    NodalField u = poisson_solve(disc, model.f);

    ReportRow first{0, eval_energy(u, model, disc), eval_gradient(u, model, disc).values.norm()};
    metrics.fill(u, first);
    result.rows.push_back(first);

    const auto start = Clock::now();
    const SolveReport report =
        smoother.run(u, NodalField::zeros(disc.mesh()), cfg.max_cycles, cfg.outer_tol,
                     [&](const NodalField& v, const IterationRecord& it) {
                       ReportRow row{it.iteration, it.energy, it.grad_norm};
                       row.alpha = it.alpha;
                       row.wall_ms = ms_since(start);
                       metrics.fill(v, row);
                       result.rows.push_back(row);
                     });
    result.u = std::move(u);
    result.status = to_string(report.status);
    result.exit_code = exit_code_for(report.status);
    result.finest_steps = report.iterations();
    return result;
  }

  MgOpt solver(hierarchy, model, mg_cfg);
  const Metrics metrics = make_metrics(cfg, model, solver.finest(), log);
  const auto observe = [&](const NodalField& v, CycleRecord& c) {
    ReportRow row;
    metrics.fill(v, row);
    c.err_s = row.err_s;
    c.plug_flow = row.plug_flow;
    c.err_pf = row.err_pf;
  };

  NodalField u;
  MgoptReport report;
  if (cfg.mode == Mode::fmg) {
    report = solver.fmg(u, observe);
    // One pass by construction; finishing it is the success criterion.
    result.status = "completed";
    result.exit_code = kExitConverged;
  } else {
    u = poisson_solve(solver.finest(), model.f);
    ReportRow first;
    first.energy = eval_energy(u, model, solver.finest());
    first.grad_norm = eval_gradient(u, model, solver.finest()).values.norm();
    metrics.fill(u, first);
    result.rows.push_back(first);
    report = solver.solve(u, observe);
    result.status = to_string(report.status);
    result.exit_code = exit_code_for(report.status);
  }
  for (const CycleRecord& c : report.cycles) result.rows.push_back(from_cycle(c));
  result.finest_steps = report.cycles.empty() ? 0 : report.cycles.back().finest_steps;
  if (log && report.skipped_corrections > 0) {
    *log << "warning: " << report.skipped_corrections << " of " << report.corrections
         << " coarse corrections skipped\n";
  }
  result.u = std::move(u);
  return result;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    std::filesystem::create_directories(cfg.output);
    const SolveResult result = run_solve(cfg, &err);

    io::CsvWriter csv(cfg.output / "report.csv", report_header());
    for (const ReportRow& row : result.rows) csv.row(format_row(row));
    io::write_field(cfg.output / "solution.txt", result.mesh, result.u);
    io::write_mesh(cfg.output / "mesh.txt", result.mesh);

    const std::vector<std::string>& header = report_header();
    const std::vector<std::string> last = format_row(result.rows.back());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (std::size_t i = 0; i < last.size(); ++i) out << (i ? "," : "") << last[i];
    out << '\n';
    out << "status: " << result.status << ", finest-grid steps: " << result.finest_steps << '\n';
    if (result.exit_code == kExitError) err << "error: solver stopped with " << result.status << '\n';
    return result.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_mesh_info(int levels, std::ostream& out, std::ostream& err) {
  try {
    if (levels < 1 || levels > 9) throw ArgumentError("levels must lie in 1..9");
    const MeshHierarchy h = MeshHierarchy::unit_disk(levels);
    out << "level,nodes,triangles,boundary,area\n";
    for (const MeshLevel& m : h.levels()) {
      m.check_invariants();
      out << m.level << ',' << m.num_nodes() << ',' << m.num_triangles() << ',' << m.num_boundary() << ','
          << io::sci(m.total_area()) << '\n';
    }
    return kExitConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace viscogrid::cli
