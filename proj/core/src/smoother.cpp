#include "viscogrid/smoother.hpp"

#include <algorithm>
#include <cmath>

#include "viscogrid/error.hpp"

namespace viscogrid {

void SmootherConfig::validate() const {
  if (!(sigma1 > 0.0 && sigma1 < 0.5)) throw ArgumentError("SmootherConfig: sigma1 must lie in (0, 1/2)");
  if (!(alpha_min > 0.0)) throw ArgumentError("SmootherConfig: alpha_min must be > 0");
  if (!(eps > 0.0)) throw ArgumentError("SmootherConfig: eps must be > 0");
  if (max_backtracks < 1) throw ArgumentError("SmootherConfig: max_backtracks must be >= 1");
  if (!(rel_tol >= 0.0)) throw ArgumentError("SmootherConfig: rel_tol must be >= 0");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_budget: return "iteration-budget";
    case SolveStatus::line_search_failure: return "line-search-failure";
  }
  return "unknown";
}

LineSearchResult line_search(double phi0, double dphi0, const std::function<double(double)>& phi,
                             const SmootherConfig& cfg, double step_scale) {
  if (!(dphi0 < 0.0)) throw AscentDirectionError("line_search: phi'(0) >= 0, not a descent direction");

  double alpha = 1.0;
  double prev_alpha = 0.0;
  double prev_value = 0.0;
  for (int backtracks = 0;; ++backtracks) {
    const double value = phi(alpha);
    if (std::isfinite(value) && value <= phi0 + cfg.sigma1 * alpha * dphi0) {
      return {alpha, value, backtracks};
    }
    if (backtracks == cfg.max_backtracks) {
      throw LineSearchFailure("line_search: backtrack budget exhausted at alpha = " + std::to_string(alpha));
    }
    if (alpha * step_scale < cfg.alpha_min) {
      throw LineSearchFailure("line_search: step too small (alpha = " + std::to_string(alpha) + ")");
    }

    double next = 0.5 * alpha;
    if (!std::isfinite(value)) {
      next = 0.1 * alpha;
    } else if (backtracks == 0) {
      // argmin of the quadratic model through phi(0), phi'(0), phi(alpha).
      next = -dphi0 * alpha * alpha / (2.0 * (value - phi0 - dphi0 * alpha));
      next = std::max(next, 0.1 * alpha);
    } else {
      const double r1 = value - phi0 - dphi0 * alpha;
      const double r2 = prev_value - phi0 - dphi0 * prev_alpha;
      const double span = alpha - prev_alpha;
      const double c = (r1 / (alpha * alpha) - r2 / (prev_alpha * prev_alpha)) / span;
      const double d = (-prev_alpha * r1 / (alpha * alpha) + alpha * r2 / (prev_alpha * prev_alpha)) / span;
      double trial;
      if (c == 0.0) {
        trial = -dphi0 / (2.0 * d);
      } else {
        const double disc = d * d - 3.0 * c * dphi0;
        trial = disc >= 0.0 ? (-d + std::sqrt(disc)) / (3.0 * c) : 0.5 * alpha;
      }
      if (!std::isfinite(trial)) trial = 0.5 * alpha;
      next = std::clamp(trial, 0.1 * alpha, 0.5 * alpha);
    }
    prev_alpha = alpha;
    prev_value = value;
    alpha = next;
  }
}

Smoother::Smoother(const Discretization& disc, ModelSpec model, SmootherConfig cfg)
    : disc_(&disc), model_(std::move(model)), cfg_(cfg) {
  model_.validate();
  cfg_.validate();
}

NodalField Smoother::descent_direction(const NodalField& u, const NodalField& grad) {
  const Eigen::VectorXd rhs = -disc_->to_free(grad.values);
  Eigen::VectorXd w;
  if (preconditioner_is_constant(model_)) {
    w = disc_->stiffness_solver().solve(rhs);
  } else {
    solver_.factorize(assemble_preconditioner(u, model_, *disc_, cfg_.eps, cfg_.casson_weight));
    w = solver_.solve(rhs);
  }
  return {disc_->level(), disc_->to_full(w)};
}

StepRecord Smoother::descent_iterate(NodalField& u, const NodalField& fhat) {
  return descent_iterate(u, fhat, eval_gradient(u, model_, *disc_, fhat));
}

StepRecord Smoother::descent_iterate(NodalField& u, const NodalField& fhat, const NodalField& grad) {
  const NodalField w = descent_direction(u, grad);
  const double slope = grad.values.dot(w.values);
  if (!(slope < 0.0)) {
    throw NumericError("descent_iterate: preconditioned direction is not a descent direction (slope " +
                       std::to_string(slope) + ")");
  }
  const double scale = w.values.lpNorm<Eigen::Infinity>() / std::max(1.0, u.values.lpNorm<Eigen::Infinity>());
  const auto phi = [&](double alpha) { return eval_energy_change(u, w, alpha, model_, *disc_, fhat, slope); };
  const LineSearchResult ls = line_search(0.0, slope, phi, cfg_, scale);
  u.values += ls.alpha * w.values;
  return {ls.alpha, ls.backtracks, ls.value, slope};
}

SolveReport Smoother::run(NodalField& u, const NodalField& fhat, int max_iterations, double rel_tol,
                          const Observer& observer) {
  SolveReport report;
  report.initial_energy = eval_energy(u, model_, *disc_, fhat);
  NodalField grad = eval_gradient(u, model_, *disc_, fhat);
  double grad_norm = grad.values.norm();
  report.initial_grad_norm = grad_norm;
  report.final_grad_norm = grad_norm;
  const double target = rel_tol * grad_norm;
  double energy = report.initial_energy;

  if (grad_norm == 0.0 || (rel_tol > 0.0 && grad_norm <= target)) {
    report.status = SolveStatus::converged;
    return report;
  }
  for (int it = 1; it <= max_iterations; ++it) {
    StepRecord step;
    try {
      step = descent_iterate(u, fhat, grad);
    } catch (const LineSearchFailure&) {
      report.status = SolveStatus::line_search_failure;
      return report;
    }
    energy += step.energy_change;
    grad = eval_gradient(u, model_, *disc_, fhat);
    grad_norm = grad.values.norm();
    report.final_grad_norm = grad_norm;
    report.records.push_back({it, energy, grad_norm, step.alpha, step.backtracks});
    if (observer) observer(u, report.records.back());
    if (grad_norm == 0.0 || (rel_tol > 0.0 && grad_norm <= target)) {
      report.status = SolveStatus::converged;
      return report;
    }
  }
  report.status = SolveStatus::iteration_budget;
  return report;
}

}  // namespace viscogrid
