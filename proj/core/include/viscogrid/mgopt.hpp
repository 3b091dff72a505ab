#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "viscogrid/fem.hpp"
#include "viscogrid/mesh.hpp"
#include "viscogrid/smoother.hpp"

namespace viscogrid {

/// How the fine iterate is carried to the coarse level before the coarse
/// subproblem is set up.
enum class IterateTransfer {
  restriction,  ///< the transpose of prolongation (same map as for gradients)
  injection,    ///< values at the inherited nodes
};

struct MgoptConfig {
  int nu1 = 2;
  int nu2 = 2;
  SmootherConfig smoother;
  double outer_tol = 1e-7;  ///< relative reduction of the finest gradient norm
  int max_cycles = 100;
  double coarse_tol = 1e-10;  ///< relative gradient reduction of the coarsest solve
  int coarse_max_iterations = 100;
  IterateTransfer iterate_transfer = IterateTransfer::restriction;

  void validate() const;
};

struct CycleRecord {
  int cycle = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double alpha = 0.0;      ///< coarse-correction step on the finest level
  int finest_steps = 0;    ///< cumulative smoothing steps on the finest level
  double wall_ms = 0.0;    ///< cumulative
  double err_s = std::numeric_limits<double>::quiet_NaN();
  double plug_flow = std::numeric_limits<double>::quiet_NaN();
  double err_pf = std::numeric_limits<double>::quiet_NaN();
};

struct MgoptReport {
  std::vector<CycleRecord> cycles;
  SolveStatus status = SolveStatus::iteration_budget;
  double initial_energy = 0.0;
  double initial_grad_norm = 0.0;
  int corrections = 0;          ///< coarse corrections attempted (all levels)
  int skipped_corrections = 0;  ///< corrections rejected as non-descent or by the line search
  std::vector<double> level_wall_ms;  ///< FMG: time spent per visited level
};

/// Fills the metric columns of a record (Err_s, plug flow, ...) from the
/// current finest iterate.
using CycleObserver = std::function<void(const NodalField& u, CycleRecord& record)>;

/// Called after every finest-level smoothing step and after every accepted
/// finest-level coarse correction, with the running count of finest steps.
using StepObserver = std::function<void(const NodalField& u, int finest_steps)>;

/// Recursive multigrid optimization over a nested hierarchy. The smoother on
/// every level is preconditioned descent; coarse subproblems carry the
/// first-order correction shift fhat.
class MgOpt {
 public:
  MgOpt(const MeshHierarchy& hierarchy, ModelSpec model, MgoptConfig cfg = {});

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const Discretization& level(int k) const { return *levels_.at(k); }
  const Discretization& finest() const { return *levels_.back(); }
  const ModelSpec& model() const { return model_; }
  const MgoptConfig& config() const { return cfg_; }
  Smoother& smoother(int k) { return *smoothers_.at(k); }

  /// One V-cycle on level k for min J_k(u) - fhat^T u.
  NodalField vcycle(int k, NodalField u, const NodalField& fhat);

  /// "Exact" solve of the coarsest subproblem.
  NodalField coarse_solve(NodalField u, const NodalField& fhat);

  /// Carries an iterate from level k to k-1 (boundary entries zeroed).
  NodalField transfer_iterate(int k, const NodalField& u) const;

  /// Shift of the level k-1 subproblem built from level k at (u_fine, fhat_fine)
  /// with coarse iterate u_coarse.
  NodalField coarse_shift(int k, const NodalField& u_fine, const NodalField& fhat_fine,
                          const NodalField& u_coarse) const;

  /// V-cycles from u0 on the finest level until the finest gradient norm drops
  /// by outer_tol or max_cycles is reached.
  MgoptReport solve(NodalField& u, const CycleObserver& observer = {});

  /// Full multigrid: coarsest solve from the Poisson initial guess, then one
  /// V-cycle per level after prolongation.
  MgoptReport fmg(NodalField& u, const CycleObserver& observer = {});

  void set_step_observer(StepObserver observer) { step_observer_ = std::move(observer); }

  int corrections() const { return corrections_; }
  int skipped_corrections() const { return skipped_; }
  int finest_steps() const { return finest_steps_; }

 private:
  ModelSpec model_;
  MgoptConfig cfg_;
  std::vector<std::unique_ptr<Discretization>> levels_;
  std::vector<std::unique_ptr<Smoother>> smoothers_;
  int corrections_ = 0;
  int skipped_ = 0;
  int finest_steps_ = 0;
  double last_alpha_ = 0.0;
  StepObserver step_observer_;

  SolveReport smooth_level(int k, NodalField& u, const NodalField& fhat, int count);
};

/// Poisson initial guess on the finest level followed by MgOpt::solve.
std::pair<NodalField, MgoptReport> mgopt_solve(const ModelSpec& model, const MeshHierarchy& hierarchy,
                                               const MgoptConfig& cfg, const CycleObserver& observer = {});

std::pair<NodalField, MgoptReport> fmg_solve(const ModelSpec& model, const MeshHierarchy& hierarchy,
                                             const MgoptConfig& cfg, const CycleObserver& observer = {});

struct ReferenceConfig {
  double rel_tol = 1e-11;
  int max_iterations = 20000;
  /// Once the gradient is below stall_after times its initial norm, stop when
  /// it has not reached a new minimum for stall_window iterates. Near rel_tol
  /// the gradient sits at the rounding level of u. The gradient norm is not
  /// monotone early on, so the check stays off until then.
  double stall_after = 1e-9;
  int stall_window = 100;
  SmootherConfig smoother = [] {
    SmootherConfig c;
    c.alpha_min = 1e-30;
    c.max_backtracks = 60;
    return c;
  }();

  void validate() const;
};

enum class ReferenceStop { tolerance, stalled, line_search_failure, iteration_budget };

std::string to_string(ReferenceStop stop);

struct ReferenceReport {
  int iterations = 0;
  ReferenceStop stop = ReferenceStop::iteration_budget;
  double initial_grad_norm = 0.0;
  double best_grad_norm = 0.0;
};

/// High-accuracy solution on one level for the Err_s metric: single-grid
/// preconditioned descent from the Poisson guess. Returns the iterate with
/// the smallest gradient norm seen.
std::pair<NodalField, ReferenceReport> reference_solution(const ModelSpec& model, const Discretization& disc,
                                                          const ReferenceConfig& cfg = {});

}  // namespace viscogrid
