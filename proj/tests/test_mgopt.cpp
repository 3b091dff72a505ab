#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "viscogrid/analytic.hpp"
#include "viscogrid/error.hpp"
#include "viscogrid/mgopt.hpp"

using namespace viscogrid;
using viscogrid::testing::disk7;
using viscogrid::testing::random_field;

namespace {

// Levels 2..4 (41, 145, 545 nodes): small enough for exhaustive checks.
const MeshHierarchy& small3() {
  static const MeshHierarchy h = MeshHierarchy::unit_disk(5).finest_levels(3);
  return h;
}

}  // namespace

TEST(MgoptConfigTest, Validation) {
  MgoptConfig c;
  c.nu1 = -1;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.nu1 = 0;
  c.nu2 = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.outer_tol = -1.0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.smoother.sigma1 = 0.0;
  EXPECT_THROW(MgOpt(small3(), ModelSpec::bingham(0.1), c), ArgumentError);
}

TEST(Mgopt, CoarsestCycleIsCoarseSolve) {
  const ModelSpec m = ModelSpec::herschel_bulkley(1.75, 0.2);
  MgOpt a(small3(), m), b(small3(), m);
  std::mt19937_64 rng(1);
  const NodalField u = random_field(a.level(0).mesh(), rng, 0.05);
  const NodalField fhat = random_field(a.level(0).mesh(), rng, 1e-3);
  EXPECT_EQ(a.vcycle(0, u, fhat).values, b.coarse_solve(u, fhat).values);
}

TEST(Mgopt, CoarseSolveReachesTolerance) {
  const ModelSpec m = ModelSpec::herschel_bulkley(1.75, 0.0);
  MgOpt mg(small3(), m);
  const Discretization& disc = mg.level(0);
  const NodalField fhat = NodalField::zeros(disc.mesh());
  const NodalField u0 = NodalField::zeros(disc.mesh());
  const double g0 = eval_gradient(u0, m, disc).values.norm();
  const NodalField u = mg.coarse_solve(u0, fhat);
  EXPECT_LE(eval_gradient(u, m, disc).values.norm(), 1e-10 * g0);
}

TEST(Mgopt, ShiftMakesCoarseGradientMatchRestrictedFineGradient) {
  for (const ModelSpec& m : {ModelSpec::herschel_bulkley(1.75, 0.2), ModelSpec::casson(0.2)}) {
    for (IterateTransfer t : {IterateTransfer::restriction, IterateTransfer::injection}) {
      MgoptConfig cfg;
      cfg.iterate_transfer = t;
      MgOpt mg(small3(), m, cfg);
      const int k = 2;
      const Discretization& fine = mg.level(k);
      const Discretization& coarse = mg.level(k - 1);
      std::mt19937_64 rng(2);
      const NodalField u = random_field(fine.mesh(), rng, 0.1);
      const NodalField fhat = random_field(fine.mesh(), rng, 1e-3);
      const NodalField uc = mg.transfer_iterate(k, u);
      const NodalField shift = mg.coarse_shift(k, u, fhat, uc);

      // Oracle: explicit prolongation matrix, boundary rows dropped.
      const Eigen::SparseMatrix<double> p = prolongation_matrix(fine.mesh());
      Eigen::VectorXd restricted = p.transpose() * eval_gradient(u, m, fine, fhat).values;
      apply_dirichlet_mask(coarse.mesh(), restricted);
      const Eigen::VectorXd coarse_grad = eval_gradient(uc, m, coarse, shift).values;
      EXPECT_LE((coarse_grad - restricted).lpNorm<Eigen::Infinity>(),
                1e-13 * restricted.lpNorm<Eigen::Infinity>());
      for (int i = 0; i < coarse.mesh().num_nodes(); ++i) {
        if (coarse.mesh().is_boundary[i]) {
          EXPECT_EQ(shift.values[i], 0.0);
          EXPECT_EQ(uc.values[i], 0.0);
        }
      }
    }
  }
}

TEST(Mgopt, TransferIterate) {
  MgoptConfig cfg;
  MgOpt restr(small3(), ModelSpec::bingham(0.1), cfg);
  cfg.iterate_transfer = IterateTransfer::injection;
  MgOpt inj(small3(), ModelSpec::bingham(0.1), cfg);
  std::mt19937_64 rng(3);
  const NodalField u = random_field(restr.finest().mesh(), rng);
  const MeshLevel& fine = restr.finest().mesh();
  NodalField expected = restrict_field(u, fine);
  apply_dirichlet_mask(restr.level(1).mesh(), expected.values);
  EXPECT_EQ(restr.transfer_iterate(2, u).values, expected.values);
  EXPECT_EQ(inj.transfer_iterate(2, u).values, inject(u, fine).values);
}

TEST(Mgopt, SolutionIsFixedPoint) {
  const ModelSpec m = ModelSpec::herschel_bulkley(1.75, 0.0);
  MgOpt mg(small3(), m);
  const Discretization& disc = mg.finest();
  const auto [ref, rep] = reference_solution(m, disc);
  ASSERT_EQ(rep.stop, ReferenceStop::tolerance);
  const NodalField after = mg.vcycle(2, ref, NodalField::zeros(disc.mesh()));
  EXPECT_LE(l2_distance(after, ref, disc), 1e-9);
}

TEST(Mgopt, NoSkippedCorrections) {
  for (const ModelSpec& m : {ModelSpec::herschel_bulkley(1.75, 0.2), ModelSpec::bingham(0.4), ModelSpec::casson(0.2),
                             ModelSpec::herschel_bulkley(5.0, 0.1)}) {
    MgoptConfig cfg;
    cfg.max_cycles = 15;
    MgOpt mg(small3(), m, cfg);
    NodalField u = poisson_solve(mg.finest(), 1.0);
    const MgoptReport r = mg.solve(u);
    EXPECT_EQ(r.skipped_corrections, 0) << m.name() << " p=" << m.p();
    EXPECT_EQ(r.corrections, 2 * static_cast<int>(r.cycles.size()));
  }
}

TEST(Mgopt, StoppingRuleFiresAtFirstQualifyingCycle) {
  // Yield stress problems need hundreds of cycles at gamma = 1e3; these two converge quickly.
  for (const ModelSpec& m : {ModelSpec::herschel_bulkley(1.75, 0.0), ModelSpec::casson(0.2)}) {
    MgoptConfig cfg;
    cfg.max_cycles = 200;
    MgOpt mg(small3(), m, cfg);
    NodalField u = poisson_solve(mg.finest(), 1.0);
    const MgoptReport r = mg.solve(u);
    EXPECT_EQ(r.status, SolveStatus::converged) << m.name();
    const double target = 1e-7 * r.initial_grad_norm;
    EXPECT_LE(r.cycles.back().grad_norm, target);
    for (std::size_t i = 0; i + 1 < r.cycles.size(); ++i) EXPECT_GT(r.cycles[i].grad_norm, target);
  }
}

TEST(Mgopt, EnergyNeverIncreasesWithinCycles) {
  const ModelSpec m = ModelSpec::herschel_bulkley(1.75, 0.2);
  MgoptConfig cfg;
  cfg.max_cycles = 5;
  MgOpt mg(small3(), m, cfg);
  NodalField u = poisson_solve(mg.finest(), 1.0);
  double prev = eval_energy(u, m, mg.finest());
  int calls = 0, last_steps = 0;
  mg.set_step_observer([&](const NodalField& v, int steps) {
    const double j = eval_energy(v, m, mg.finest());
    EXPECT_LE(j, prev + 1e-15 * std::abs(prev));
    EXPECT_GE(steps, last_steps);
    prev = j;
    last_steps = steps;
    ++calls;
  });
  const MgoptReport r = mg.solve(u);
  EXPECT_EQ(r.cycles.back().finest_steps, mg.finest_steps());
  EXPECT_EQ(mg.finest_steps(), 4 * static_cast<int>(r.cycles.size()));
  EXPECT_EQ(calls, mg.finest_steps() + static_cast<int>(r.cycles.size()) - r.skipped_corrections);
  for (std::size_t i = 1; i < r.cycles.size(); ++i) EXPECT_LE(r.cycles[i].energy, r.cycles[i - 1].energy);
}

TEST(Mgopt, SingleLevelSolveIsDescent) {
  const ModelSpec m = ModelSpec::bingham(0.2);
  const MeshHierarchy one = MeshHierarchy::unit_disk(4).finest_levels(1);
  MgoptConfig cfg;
  cfg.max_cycles = 6;
  auto [u, r] = mgopt_solve(m, one, cfg);

  Discretization disc(one.finest());
  Smoother s(disc, m, cfg.smoother);
  NodalField v = poisson_solve(disc, 1.0);
  s.run(v, NodalField::zeros(disc.mesh()), 6, 0.0);
  EXPECT_EQ(r.cycles.size(), 6u);
  EXPECT_EQ(u.values, v.values);
}

TEST(Mgopt, FmgAccurateOnSmallHierarchy) {
  const ModelSpec m = ModelSpec::herschel_bulkley(1.75, 0.0);
  auto [u, r] = fmg_solve(m, small3(), MgoptConfig{});
  ASSERT_EQ(r.cycles.size(), 1u);
  EXPECT_EQ(r.level_wall_ms.size(), 3u);
  EXPECT_EQ(r.skipped_corrections, 0);
  EXPECT_EQ(r.cycles[0].finest_steps, 4);
  Discretization disc(small3().finest());
  const auto [ref, rep] = reference_solution(m, disc);
  EXPECT_LE(err_s(u, ref, disc), 1e-7);
}

TEST(Mgopt, ArgumentChecks) {
  MgOpt mg(small3(), ModelSpec::bingham(0.1));
  const NodalField wrong = NodalField::zeros(mg.level(1).mesh());
  EXPECT_THROW(mg.vcycle(2, wrong, wrong), ArgumentError);
  EXPECT_THROW(mg.vcycle(3, wrong, wrong), ArgumentError);
}

TEST(Reference, StopsAtToleranceAndReturnsBest) {
  const Discretization disc(disk7().level(4));
  const ModelSpec m = ModelSpec::herschel_bulkley(1.75, 0.0);
  const auto [u, rep] = reference_solution(m, disc);
  EXPECT_EQ(rep.stop, ReferenceStop::tolerance);
  EXPECT_LE(rep.best_grad_norm, 1e-11 * rep.initial_grad_norm);
  EXPECT_DOUBLE_EQ(eval_gradient(u, m, disc).values.norm(), rep.best_grad_norm);

  ReferenceConfig short_run;
  short_run.max_iterations = 3;
  const auto [v, rep3] = reference_solution(ModelSpec::bingham(0.4), disc, short_run);
  EXPECT_EQ(rep3.stop, ReferenceStop::iteration_budget);
  EXPECT_EQ(rep3.iterations, 3);
  EXPECT_EQ(to_string(ReferenceStop::stalled), "stalled");
}
