#include <chrono>
#include <ostream>
#include <string>
#include <vector>

#include "viscogrid/analytic.hpp"
#include "viscogrid/cli/commands.hpp"
#include "viscogrid/error.hpp"
#include "viscogrid/io.hpp"

namespace viscogrid::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Sample {
  int steps = 0;
  double err_s = 0.0;
  double plug_flow = 0.0;
  double err_pf = 0.0;
  double wall_ms = 0.0;
};

struct Case {
  ModelSpec model;
  int finest = 7;
  int levels = 5;
  int nu1 = 2;
  int nu2 = 2;
  int cycles = 9;
};

class Table {
 public:
  Table(std::filesystem::path path, std::vector<std::string> header)
      : csv_(path, header), header_(std::move(header)), path_(std::move(path)) {}

  void row(const std::vector<std::string>& cells) {
    csv_.row(cells);
    rows_.push_back(cells);
  }

  void print(std::ostream& out) const {
    out << "# " << path_.string() << '\n';
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    }
  }

 private:
  io::CsvWriter csv_;
  std::vector<std::string> header_;
  std::filesystem::path path_;
  std::vector<std::vector<std::string>> rows_;
};

Sample measure(const NodalField& u, const NodalField& ref, const RadialProfile& profile, const Discretization& disc) {
  Sample s;
  s.err_s = err_s(u, ref, disc);
  s.plug_flow = plug_flow_numeric(u, disc.mesh());
  s.err_pf = err_pf(u, profile, disc.mesh());
  return s;
}

/// Single-grid descent from the Poisson guess until Err_s <= target or the
/// budget runs out; one sample per iterate.
std::vector<Sample> descent_trace(const ModelSpec& model, const Discretization& disc, const SmootherConfig& cfg,
                                  const NodalField& ref, double target, int budget) {
  const RadialProfile profile = RadialProfile::from_model(model);
  Smoother smoother(disc, model, cfg);
  const NodalField zero = NodalField::zeros(disc.mesh());
  NodalField u = poisson_solve(disc, model.f);
  std::vector<Sample> trace;
  const auto start = Clock::now();
  for (int it = 1; it <= budget; ++it) {
    try {
      smoother.descent_iterate(u, zero);
    } catch (const LineSearchFailure&) {
      break;
    }
    const double elapsed = ms_since(start);
    Sample s = measure(u, ref, profile, disc);
    s.steps = it;
    s.wall_ms = elapsed;
    trace.push_back(s);
    if (s.err_s <= target) break;
  }
  return trace;
}

/// First sample with err_s <= target, or nullptr.
const Sample* first_below(const std::vector<Sample>& trace, double target) {
  for (const Sample& s : trace) {
    if (s.err_s <= target) return &s;
  }
  return nullptr;
}

std::vector<std::string> comparison_header() {
  return {"g",           "nu1",           "nu2",           "cycle",        "mg_steps",     "mg_err_s",
          "mg_plug_flow", "mg_err_pf",    "mg_wall_ms",    "descent_iterations", "descent_err_s",
          "descent_plug_flow", "descent_err_pf", "descent_wall_ms"};
}

/// MG/OPT for `c.cycles` cycles against single-grid descent run until it
/// matches each cycle's Err_s. descent_iterations is -1 when the budget ran out.
void run_comparison(const Case& c, const ExperimentOptions& opt, Table& table, std::ostream& err) {
  const MeshHierarchy hierarchy = MeshHierarchy::unit_disk(c.finest).finest_levels(c.levels);
  MgoptConfig cfg;
  cfg.nu1 = c.nu1;
  cfg.nu2 = c.nu2;
  cfg.max_cycles = c.cycles;
  MgOpt solver(hierarchy, c.model, cfg);
  const Discretization& disc = solver.finest();
  const std::filesystem::path cache = opt.cache_dir.empty() ? opt.output : opt.cache_dir;
  const NodalField ref = load_or_compute_reference(c.model, disc, c.finest, cfg.smoother, cache, &err);
  const RadialProfile profile = RadialProfile::from_model(c.model);

  NodalField u = poisson_solve(disc, c.model.f);
  std::vector<Sample> mg;
  const MgoptReport report = solver.solve(u, [&](const NodalField& v, CycleRecord& rec) {
    Sample s = measure(v, ref, profile, disc);
    s.steps = rec.finest_steps;
    s.wall_ms = rec.wall_ms;
    mg.push_back(s);
  });
  if (report.skipped_corrections > 0) {
    err << "warning: " << report.skipped_corrections << " of " << report.corrections << " corrections skipped\n";
  }

  double target = mg.empty() ? 0.0 : mg.front().err_s;
  for (const Sample& s : mg) target = std::min(target, s.err_s);
  const std::vector<Sample> descent = descent_trace(c.model, disc, cfg.smoother, ref, target, opt.max_descent_iterations);

  for (std::size_t i = 0; i < mg.size(); ++i) {
    const Sample& m = mg[i];
    std::vector<std::string> cells = {io::sci(c.model.g), std::to_string(c.nu1), std::to_string(c.nu2),
                                      std::to_string(i + 1), std::to_string(m.steps), io::sci(m.err_s),
                                      io::sci(m.plug_flow), io::sci(m.err_pf), io::sci(m.wall_ms)};
    if (const Sample* d = first_below(descent, m.err_s)) {
      cells.insert(cells.end(), {std::to_string(d->steps), io::sci(d->err_s), io::sci(d->plug_flow),
                                 io::sci(d->err_pf), io::sci(d->wall_ms)});
    } else {
      cells.insert(cells.end(), {"-1", "nan", "nan", "nan", "nan"});
    }
    table.row(cells);
  }
}

void experiment1(const ExperimentOptions& opt, std::ostream& out, std::ostream& err) {
  Table table(opt.output / "experiment1.csv", comparison_header());
  for (double g : {0.0, 0.2, 0.4}) {
    run_comparison({ModelSpec::herschel_bulkley(1.75, g), 7, 5, 2, 2, 9}, opt, table, err);
  }
  table.print(out);
}

void experiment2(const ExperimentOptions& opt, std::ostream& out, std::ostream& err) {
  for (auto [nu1, nu2] : {std::pair{2, 2}, std::pair{1, 3}}) {
    const std::string name = "experiment2_nu" + std::to_string(nu1) + "-" + std::to_string(nu2) + ".csv";
    Table table(opt.output / name, comparison_header());
    run_comparison({ModelSpec::bingham(0.4), 7, 5, nu1, nu2, 9}, opt, table, err);
    table.print(out);
  }
}

void experiment3(const ExperimentOptions& opt, std::ostream& out, std::ostream& err) {
  Table table(opt.output / "experiment3.csv", comparison_header());
  run_comparison({ModelSpec::herschel_bulkley(5.0, 0.1), 6, 3, 2, 2, 3}, opt, table, err);
  table.print(out);
}

/// Casson FMG with 1..5 grids. Row 1 is single-grid descent until Err_s <=
/// 1e-7; wall times cover the solve only, not mesh or factorization setup.
void experiment4(const ExperimentOptions& opt, std::ostream& out, std::ostream& err) {
  const ModelSpec model = ModelSpec::casson(0.2);
  const RadialProfile profile = RadialProfile::from_model(model);
  const MeshHierarchy full = MeshHierarchy::unit_disk(7);
  const MgoptConfig cfg;
  const std::filesystem::path cache = opt.cache_dir.empty() ? opt.output : opt.cache_dir;

  Table table(opt.output / "experiment4.csv",
              {"grids", "finest_nodes", "coarsest_nodes", "cycles", "finest_steps", "plug_flow", "err_pf", "err_s",
               "wall_ms", "rel_wall_time"});

  const Discretization fine(full.finest());
  const NodalField ref = load_or_compute_reference(model, fine, 7, cfg.smoother, cache, &err);
  const std::vector<Sample> descent = descent_trace(model, fine, cfg.smoother, ref, 1e-7, opt.max_descent_iterations);
  if (descent.empty()) throw NumericError("experiment 4: descent made no progress");
  const Sample& base = descent.back();
  table.row({"1", std::to_string(fine.mesh().num_nodes()), std::to_string(fine.mesh().num_nodes()),
             std::to_string(base.steps), std::to_string(base.steps), io::sci(base.plug_flow), io::sci(base.err_pf),
             io::sci(base.err_s), io::sci(base.wall_ms), io::sci(1.0)});

  for (int grids = 2; grids <= 5; ++grids) {
    MgOpt solver(full.finest_levels(grids), model, cfg);
    const Discretization& disc = solver.finest();
    const NodalField ref_k{disc.level(), ref.values};
    NodalField u;
    const auto start = Clock::now();
    const MgoptReport report = solver.fmg(u);
    const double wall = ms_since(start);
    const Sample s = measure(u, ref_k, profile, disc);
    table.row({std::to_string(grids), std::to_string(disc.mesh().num_nodes()),
               std::to_string(solver.level(0).mesh().num_nodes()), std::to_string(grids),
               std::to_string(report.cycles.back().finest_steps), io::sci(s.plug_flow), io::sci(s.err_pf),
               io::sci(s.err_s), io::sci(wall), io::sci(wall / base.wall_ms)});
  }
  table.print(out);
}

}  // namespace

int cmd_experiment(int id, const ExperimentOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (id < 1 || id > 4) throw ArgumentError("experiment must be 1, 2, 3 or 4");
    if (options.max_descent_iterations < 1) throw ArgumentError("descent budget must be >= 1");
    std::filesystem::create_directories(options.output);
    switch (id) {
      case 1: experiment1(options, out, err); break;
      case 2: experiment2(options, out, err); break;
      case 3: experiment3(options, out, err); break;
      case 4: experiment4(options, out, err); break;
    }
    return kExitConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace viscogrid::cli
