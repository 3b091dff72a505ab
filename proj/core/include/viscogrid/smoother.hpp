#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "viscogrid/fem.hpp"
#include "viscogrid/mesh.hpp"
#include "viscogrid/sparse.hpp"

namespace viscogrid {

struct SmootherConfig {
  double eps = 1e-6;         ///< preconditioner regularization for p < 2
  double sigma1 = 1e-4;      ///< sufficient-decrease constant, in (0, 1/2)
  double alpha_min = 1e-12;  ///< relative step below which the line search gives up
  int max_backtracks = 30;
  double rel_tol = 1e-7;     ///< stop once ||grad|| <= rel_tol * initial ||grad||; 0 disables
  CassonWeight casson_weight = CassonWeight::power;

  void validate() const;
};

enum class SolveStatus { converged, iteration_budget, line_search_failure };

std::string to_string(SolveStatus status);

struct LineSearchResult {
  double alpha = 0.0;
  double value = 0.0;  ///< phi(alpha)
  int backtracks = 0;
};

/// Backtracking by polynomial models, starting from alpha = 1.
///
/// The first backtrack minimizes the quadratic through phi(0), phi'(0), phi(1)
/// (kept >= 0.1); later ones minimize the cubic through the last two trial
/// values, kept in [0.1, 0.5] times the previous step. Fails once
/// alpha * step_scale < cfg.alpha_min or the backtrack budget runs out.
LineSearchResult line_search(double phi0, double dphi0, const std::function<double(double)>& phi,
                             const SmootherConfig& cfg, double step_scale = 1.0);

struct IterationRecord {
  int iteration = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double alpha = 0.0;
  int backtracks = 0;
};

struct SolveReport {
  std::vector<IterationRecord> records;
  SolveStatus status = SolveStatus::iteration_budget;
  double initial_energy = 0.0;
  double initial_grad_norm = 0.0;
  double final_grad_norm = 0.0;
  int iterations() const { return static_cast<int>(records.size()); }
};

struct StepRecord {
  double alpha = 0.0;
  int backtracks = 0;
  double energy_change = 0.0;
  double slope = 0.0;  ///< grad^T w
};

/// Preconditioned descent on one level: w solves P(u) w = -grad J(u) on the
/// free nodes, followed by the polynomial-model line search along w.
class Smoother {
 public:
  /// Called after every accepted iterate.
  using Observer = std::function<void(const NodalField& u, const IterationRecord& record)>;

  Smoother(const Discretization& disc, ModelSpec model, SmootherConfig cfg = {});

  const Discretization& discretization() const { return *disc_; }
  const ModelSpec& model() const { return model_; }
  const SmootherConfig& config() const { return cfg_; }

  /// -P(u)^{-1} grad, as a full nodal field with boundary zeros.
  NodalField descent_direction(const NodalField& u, const NodalField& grad);

  /// One descent step in place. Throws LineSearchFailure / NumericError.
  StepRecord descent_iterate(NodalField& u, const NodalField& fhat);
  /// Same, reusing the shifted gradient already evaluated at u.
  StepRecord descent_iterate(NodalField& u, const NodalField& fhat, const NodalField& grad);

  /// Up to `max_iterations` steps, stopping early on the relative gradient rule.
  SolveReport run(NodalField& u, const NodalField& fhat, int max_iterations, double rel_tol,
                  const Observer& observer = {});

  /// `count` steps with the configured stop rule.
  SolveReport smooth(NodalField& u, const NodalField& fhat, int count) {
    return run(u, fhat, count, cfg_.rel_tol);
  }

 private:
  const Discretization* disc_;
  ModelSpec model_;
  SmootherConfig cfg_;
  SpdSolver solver_;
};

}  // namespace viscogrid
