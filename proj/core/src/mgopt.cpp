#include "viscogrid/mgopt.hpp"

#include <chrono>
#include <string>

#include "viscogrid/error.hpp"

namespace viscogrid {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void MgoptConfig::validate() const {
  if (nu1 < 0 || nu2 < 0 || nu1 + nu2 < 1) throw ArgumentError("MgoptConfig: need nu1, nu2 >= 0 and nu1 + nu2 >= 1");
  if (!(outer_tol >= 0.0)) throw ArgumentError("MgoptConfig: outer_tol must be >= 0");
  if (max_cycles < 0) throw ArgumentError("MgoptConfig: max_cycles must be >= 0");
  if (!(coarse_tol >= 0.0) || coarse_max_iterations < 0) throw ArgumentError("MgoptConfig: bad coarse-solve settings");
  smoother.validate();
}

MgOpt::MgOpt(const MeshHierarchy& hierarchy, ModelSpec model, MgoptConfig cfg)
    : model_(std::move(model)), cfg_(cfg) {
  model_.validate();
  cfg_.validate();
  levels_.reserve(hierarchy.num_levels());
  smoothers_.reserve(hierarchy.num_levels());
  for (const MeshLevel& mesh : hierarchy.levels()) {
    levels_.push_back(std::make_unique<Discretization>(mesh));
    smoothers_.push_back(std::make_unique<Smoother>(*levels_.back(), model_, cfg_.smoother));
  }
}

NodalField MgOpt::coarse_solve(NodalField u, const NodalField& fhat) {
  smoothers_.front()->run(u, fhat, cfg_.coarse_max_iterations, cfg_.coarse_tol);
  return u;
}

NodalField MgOpt::transfer_iterate(int k, const NodalField& u) const {
  const MeshLevel& fine = levels_.at(k)->mesh();
  NodalField coarse = cfg_.iterate_transfer == IterateTransfer::restriction ? restrict_field(u, fine) : inject(u, fine);
  apply_dirichlet_mask(levels_.at(k - 1)->mesh(), coarse.values);
  return coarse;
}

NodalField MgOpt::coarse_shift(int k, const NodalField& u_fine, const NodalField& fhat_fine,
                               const NodalField& u_coarse) const {
  const Discretization& fine = *levels_.at(k);
  const Discretization& coarse = *levels_.at(k - 1);
  // fhat_{k-1} = R fhat_k + tau,  tau = grad J_{k-1}(u_c) - R grad J_k(u_k)
  //            = grad J_{k-1}(u_c) - R (grad J_k(u_k) - fhat_k).
  const NodalField fine_grad = eval_gradient(u_fine, model_, fine, fhat_fine);
  NodalField shift = eval_gradient(u_coarse, model_, coarse);
  shift.values -= restrict_field(fine_grad, fine.mesh()).values;
  apply_dirichlet_mask(coarse.mesh(), shift.values);
  return shift;
}

SolveReport MgOpt::smooth_level(int k, NodalField& u, const NodalField& fhat, int count) {
  Smoother& smoother = *smoothers_[k];
  if (k != num_levels() - 1) return smoother.smooth(u, fhat, count);
  return smoother.run(u, fhat, count, cfg_.smoother.rel_tol, [&](const NodalField& v, const IterationRecord&) {
    ++finest_steps_;
    if (step_observer_) step_observer_(v, finest_steps_);
  });
}

NodalField MgOpt::vcycle(int k, NodalField u, const NodalField& fhat) {
  if (k < 0 || k >= num_levels()) throw ArgumentError("vcycle: level " + std::to_string(k) + " out of range");
  const Discretization& disc = *levels_[k];
  if (u.level != disc.level() || u.values.size() != disc.mesh().num_nodes() || fhat.level != disc.level() ||
      fhat.values.size() != disc.mesh().num_nodes()) {
    throw ArgumentError("vcycle: iterate or shift does not live on level " + std::to_string(k));
  }
  if (k == 0) return coarse_solve(std::move(u), fhat);

  const bool finest = k == num_levels() - 1;
  smooth_level(k, u, fhat, cfg_.nu1);

  const NodalField u_coarse = transfer_iterate(k, u);
  const NodalField fhat_coarse = coarse_shift(k, u, fhat, u_coarse);
  const NodalField u_tilde = vcycle(k - 1, u_coarse, fhat_coarse);

  NodalField diff{u_coarse.level, u_tilde.values - u_coarse.values};
  NodalField e = prolongate(diff, disc.mesh());
  apply_dirichlet_mask(disc.mesh(), e.values);

  ++corrections_;
  double alpha = 0.0;
  const NodalField grad = eval_gradient(u, model_, disc, fhat);
  const double slope = grad.values.dot(e.values);
  if (slope < 0.0) {
    const double scale = e.values.lpNorm<Eigen::Infinity>() / std::max(1.0, u.values.lpNorm<Eigen::Infinity>());
    const auto phi = [&](double a) { return eval_energy_change(u, e, a, model_, disc, fhat, slope); };
    try {
      alpha = line_search(0.0, slope, phi, cfg_.smoother, scale).alpha;
      u.values += alpha * e.values;
    } catch (const LineSearchFailure&) {
      alpha = 0.0;
    }
  }
  if (alpha == 0.0) ++skipped_;
  if (finest) {
    last_alpha_ = alpha;
    if (alpha > 0.0 && step_observer_) step_observer_(u, finest_steps_);
  }

  smooth_level(k, u, fhat, cfg_.nu2);
  return u;
}

MgoptReport MgOpt::solve(NodalField& u, const CycleObserver& observer) {
  const Discretization& disc = finest();
  const NodalField zero = NodalField::zeros(disc.mesh());
  const int top = num_levels() - 1;
  const auto start = Clock::now();

  MgoptReport report;
  report.initial_energy = eval_energy(u, model_, disc);
  double grad_norm = eval_gradient(u, model_, disc).values.norm();
  report.initial_grad_norm = grad_norm;
  const double target = cfg_.outer_tol * grad_norm;
  const int skipped_before = skipped_;
  const int corrections_before = corrections_;
  const int steps_before = finest_steps_;

  report.status = SolveStatus::iteration_budget;
  if (grad_norm == 0.0 || grad_norm <= target) report.status = SolveStatus::converged;
  for (int cycle = 1; cycle <= cfg_.max_cycles && report.status != SolveStatus::converged; ++cycle) {
    if (top == 0) {
      // Single grid: one cycle is one descent step.
      SolveReport step = smoothers_[0]->run(u, zero, 1, 0.0);
      finest_steps_ += step.iterations();
      if (step_observer_ && step.iterations() > 0) step_observer_(u, finest_steps_);
      last_alpha_ = step.records.empty() ? 0.0 : step.records.back().alpha;
      if (step.status == SolveStatus::line_search_failure) report.status = SolveStatus::line_search_failure;
    } else {
      u = vcycle(top, std::move(u), zero);
    }
    grad_norm = eval_gradient(u, model_, disc).values.norm();

    CycleRecord rec;
    rec.cycle = cycle;
    rec.energy = eval_energy(u, model_, disc);
    rec.grad_norm = grad_norm;
    rec.alpha = last_alpha_;
    rec.finest_steps = finest_steps_ - steps_before;
    rec.wall_ms = ms_since(start);
    if (observer) observer(u, rec);
    report.cycles.push_back(rec);

    if (grad_norm == 0.0 || grad_norm <= target) report.status = SolveStatus::converged;
    if (report.status == SolveStatus::line_search_failure) break;
  }
  report.corrections = corrections_ - corrections_before;
  report.skipped_corrections = skipped_ - skipped_before;
  return report;
}

MgoptReport MgOpt::fmg(NodalField& u, const CycleObserver& observer) {
  const auto start = Clock::now();
  MgoptReport report;
  const int skipped_before = skipped_;
  const int corrections_before = corrections_;
  const int steps_before = finest_steps_;

  auto level_start = Clock::now();
  u = poisson_solve(*levels_.front(), model_.f);
  report.initial_energy = eval_energy(u, model_, *levels_.front());
  report.initial_grad_norm = eval_gradient(u, model_, *levels_.front()).values.norm();
  const SolveReport coarse = smoothers_.front()->run(u, NodalField::zeros(levels_.front()->mesh()),
                                                    cfg_.coarse_max_iterations, cfg_.coarse_tol);
  if (num_levels() == 1) finest_steps_ += coarse.iterations();
  report.level_wall_ms.push_back(ms_since(level_start));

  for (int k = 1; k < num_levels(); ++k) {
    level_start = Clock::now();
    // The sub-hierarchy 0..k is cycled with level k as its finest grid.
    NodalField fine = prolongate(u, levels_[k]->mesh());
    apply_dirichlet_mask(levels_[k]->mesh(), fine.values);
    u = vcycle(k, std::move(fine), NodalField::zeros(levels_[k]->mesh()));
    report.level_wall_ms.push_back(ms_since(level_start));
  }

  const Discretization& disc = finest();
  CycleRecord rec;
  rec.cycle = 1;
  rec.energy = eval_energy(u, model_, disc);
  rec.grad_norm = eval_gradient(u, model_, disc).values.norm();
  rec.alpha = num_levels() > 1 ? last_alpha_ : 0.0;
  rec.finest_steps = finest_steps_ - steps_before;
  rec.wall_ms = ms_since(start);
  if (observer) observer(u, rec);
  report.cycles.push_back(rec);
  report.status = num_levels() == 1 ? coarse.status : SolveStatus::iteration_budget;
  report.corrections = corrections_ - corrections_before;
  report.skipped_corrections = skipped_ - skipped_before;
  return report;
}

std::pair<NodalField, MgoptReport> mgopt_solve(const ModelSpec& model, const MeshHierarchy& hierarchy,
                                               const MgoptConfig& cfg, const CycleObserver& observer) {
  MgOpt solver(hierarchy, model, cfg);
  NodalField u = poisson_solve(solver.finest(), model.f);
  MgoptReport report = solver.solve(u, observer);
  return {std::move(u), std::move(report)};
}

std::pair<NodalField, MgoptReport> fmg_solve(const ModelSpec& model, const MeshHierarchy& hierarchy,
                                             const MgoptConfig& cfg, const CycleObserver& observer) {
  MgOpt solver(hierarchy, model, cfg);
  NodalField u;
  MgoptReport report = solver.fmg(u, observer);
  return {std::move(u), std::move(report)};
}

void ReferenceConfig::validate() const {
  if (!(rel_tol >= 0.0) || !(stall_after >= 0.0) || max_iterations < 0 || stall_window < 1) throw ArgumentError("ReferenceConfig: bad settings");
  smoother.validate();
}

std::string to_string(ReferenceStop stop) {
  switch (stop) {
    case ReferenceStop::tolerance: return "tolerance";
    case ReferenceStop::stalled: return "stalled";
    case ReferenceStop::line_search_failure: return "line-search-failure";
    case ReferenceStop::iteration_budget: return "iteration-budget";
  }
  return "unknown";
}

std::pair<NodalField, ReferenceReport> reference_solution(const ModelSpec& model, const Discretization& disc,
                                                          const ReferenceConfig& cfg) {
  cfg.validate();
  Smoother smoother(disc, model, cfg.smoother);
  const NodalField zero = NodalField::zeros(disc.mesh());
  NodalField u = poisson_solve(disc, model.f);
  NodalField grad = eval_gradient(u, model, disc);

  ReferenceReport report;
  report.initial_grad_norm = grad.values.norm();
  report.best_grad_norm = report.initial_grad_norm;
  const double target = cfg.rel_tol * report.initial_grad_norm;
  NodalField best = u;
  int best_iteration = 0;
  if (report.initial_grad_norm <= target) {
    report.stop = ReferenceStop::tolerance;
    return {std::move(u), report};
  }
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    try {
      smoother.descent_iterate(u, zero, grad);
    } catch (const LineSearchFailure&) {
      report.stop = ReferenceStop::line_search_failure;
      break;
    }
    report.iterations = it;
    grad = eval_gradient(u, model, disc);
    const double norm = grad.values.norm();
    if (norm < report.best_grad_norm) {
      report.best_grad_norm = norm;
      best = u;
      best_iteration = it;
    }
    if (norm <= target) {
      report.stop = ReferenceStop::tolerance;
      break;
    }
    if (report.best_grad_norm <= cfg.stall_after * report.initial_grad_norm && it - best_iteration >= cfg.stall_window) {
      report.stop = ReferenceStop::stalled;
      break;
    }
  }
  return {std::move(best), report};
}

}  // namespace viscogrid
