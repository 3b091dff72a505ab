#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "support.hpp"
#include "viscogrid/error.hpp"
#include "viscogrid/mesh.hpp"

using namespace viscogrid;
using viscogrid::testing::disk7;

TEST(Mesh, CoarseDisk) {
  const MeshLevel m = build_unit_disk_coarse();
  ASSERT_EQ(m.num_nodes(), 5);
  ASSERT_EQ(m.num_triangles(), 4);
  EXPECT_EQ(m.num_boundary(), 4);
  EXPECT_EQ(m.is_boundary[0], 0);
  EXPECT_DOUBLE_EQ(m.total_area(), 2.0);
  for (int t = 0; t < 4; ++t) EXPECT_GT(m.signed_area(t), 0.0);
}

TEST(Mesh, NodeCountsOfSevenLevels) {
  const int expected[] = {5, 13, 41, 145, 545, 2113, 8321};
  const MeshHierarchy& h = disk7();
  ASSERT_EQ(h.num_levels(), 7);
  for (int k = 0; k < 7; ++k) {
    EXPECT_EQ(h.level(k).num_nodes(), expected[k]) << "level " << k;
    EXPECT_EQ(h.level(k).num_triangles(), 4 << (2 * k));
    EXPECT_EQ(h.level(k).num_boundary(), 4 << k);
  }
}

TEST(Mesh, RefinedLevelsSatisfyInvariants) {
  const MeshHierarchy& h = disk7();
  for (const MeshLevel& m : h.levels()) {
    EXPECT_NO_THROW(m.check_invariants());
    for (int t = 0; t < m.num_triangles(); ++t) ASSERT_GT(m.signed_area(t), 0.0);
    for (int i = 0; i < m.num_nodes(); ++i) {
      if (m.is_boundary[i]) EXPECT_NEAR(std::hypot(m.nodes[i].x, m.nodes[i].y), 1.0, 1e-15);
      else EXPECT_LT(std::hypot(m.nodes[i].x, m.nodes[i].y), 1.0);
    }
  }
}

TEST(Mesh, AreaIncreasesTowardPi) {
  const MeshHierarchy& h = disk7();
  double prev = 0.0;
  for (const MeshLevel& m : h.levels()) {
    EXPECT_GT(m.total_area(), prev);
    EXPECT_LT(m.total_area(), std::numbers::pi);
    prev = m.total_area();
  }
  // Inscribed regular 256-gon.
  EXPECT_NEAR(prev, 128.0 * std::sin(2.0 * std::numbers::pi / 256.0), 1e-12);
}

TEST(Mesh, NestedCoordinatesAndMidpoints) {
  const MeshHierarchy& h = disk7();
  for (int k = 1; k < h.num_levels(); ++k) {
    const MeshLevel& fine = h.level(k);
    const MeshLevel& coarse = h.level(k - 1);
    ASSERT_EQ(fine.n_coarse, coarse.num_nodes());
    for (int i = 0; i < coarse.num_nodes(); ++i) {
      EXPECT_EQ(fine.nodes[i].x, coarse.nodes[i].x);
      EXPECT_EQ(fine.nodes[i].y, coarse.nodes[i].y);
    }
    for (int j = fine.n_coarse; j < fine.num_nodes(); ++j) {
      const ParentPair pp = fine.parents[j - fine.n_coarse];
      const Point& a = coarse.nodes[pp.first];
      const Point& b = coarse.nodes[pp.second];
      const Point& m = fine.nodes[j];
      if (fine.is_boundary[j]) {
        // Midpoint of the arc: the chord midpoint pushed out to the circle.
        const double mx = 0.5 * (a.x + b.x), my = 0.5 * (a.y + b.y);
        const double r = std::hypot(mx, my);
        EXPECT_NEAR(m.x, mx / r, 1e-15);
        EXPECT_NEAR(m.y, my / r, 1e-15);
      } else {
        EXPECT_DOUBLE_EQ(m.x, 0.5 * (a.x + b.x));
        EXPECT_DOUBLE_EQ(m.y, 0.5 * (a.y + b.y));
      }
    }
  }
}

TEST(Mesh, FinestLevelsRenumbers) {
  const MeshHierarchy sub = disk7().finest_levels(3);
  ASSERT_EQ(sub.num_levels(), 3);
  EXPECT_EQ(sub.coarsest().num_nodes(), 545);
  EXPECT_EQ(sub.finest().num_nodes(), 8321);
  EXPECT_EQ(sub.coarsest().level, 0);
  EXPECT_EQ(sub.finest().level, 2);
  EXPECT_TRUE(sub.coarsest().parents.empty());
  EXPECT_THROW(disk7().finest_levels(0), ArgumentError);
  EXPECT_THROW(disk7().finest_levels(8), ArgumentError);
}

TEST(Transfer, ProlongateConstantIsConstant) {
  const MeshLevel& fine = disk7().level(3);
  const NodalField one{2, Eigen::VectorXd::Ones(fine.n_coarse)};
  const NodalField p = prolongate(one, fine);
  EXPECT_EQ(p.level, 3);
  EXPECT_TRUE(p.values.isOnes(0.0));
}

TEST(Transfer, ProlongateDelta) {
  const MeshLevel& fine = disk7().level(2);
  for (int j = 0; j < fine.n_coarse; ++j) {
    NodalField delta{1, Eigen::VectorXd::Zero(fine.n_coarse)};
    delta.values[j] = 1.0;
    const NodalField p = prolongate(delta, fine);
    for (int i = 0; i < fine.num_nodes(); ++i) {
      double expected = i == j ? 1.0 : 0.0;
      if (i >= fine.n_coarse) {
        const ParentPair pp = fine.parents[i - fine.n_coarse];
        expected = (pp.first == j || pp.second == j) ? 0.5 : 0.0;
      }
      ASSERT_EQ(p.values[i], expected) << "delta " << j << " node " << i;
    }
  }
}

TEST(Transfer, RestrictDeltaAtMidpoint) {
  const MeshLevel& fine = disk7().level(2);
  for (int j = fine.n_coarse; j < fine.num_nodes(); ++j) {
    NodalField delta{2, Eigen::VectorXd::Zero(fine.num_nodes())};
    delta.values[j] = 1.0;
    const NodalField r = restrict_field(delta, fine);
    const ParentPair pp = fine.parents[j - fine.n_coarse];
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(fine.n_coarse);
    expected[pp.first] = 0.5;
    expected[pp.second] = 0.5;
    ASSERT_EQ(r.values, expected);
  }
  EXPECT_TRUE(restrict_field(NodalField::zeros(fine), fine).values.isZero(0.0));
}

TEST(Transfer, TransposeIdentityOnEveryLevelPair) {
  std::mt19937_64 rng(7);
  const MeshHierarchy& h = disk7();
  for (int k = 1; k < h.num_levels(); ++k) {
    const MeshLevel& fine = h.level(k);
    for (int trial = 0; trial < 100; ++trial) {
      const NodalField v{k - 1, viscogrid::testing::random_vector(fine.n_coarse, rng)};
      const NodalField w{k, viscogrid::testing::random_vector(fine.num_nodes(), rng)};
      const double lhs = prolongate(v, fine).values.dot(w.values);
      const double rhs = v.values.dot(restrict_field(w, fine).values);
      ASSERT_LE(std::abs(lhs - rhs), 1e-13 * v.values.norm() * w.values.norm()) << "level " << k;
    }
  }
}

TEST(Transfer, MatrixMatchesOperator) {
  const MeshLevel& fine = disk7().level(3);
  const Eigen::SparseMatrix<double> p = prolongation_matrix(fine);
  ASSERT_EQ(p.rows(), fine.num_nodes());
  ASSERT_EQ(p.cols(), fine.n_coarse);
  std::mt19937_64 rng(3);
  const NodalField v{2, viscogrid::testing::random_vector(fine.n_coarse, rng)};
  EXPECT_LE((p * v.values - prolongate(v, fine).values).lpNorm<Eigen::Infinity>(), 1e-15);
  const NodalField w{3, viscogrid::testing::random_vector(fine.num_nodes(), rng)};
  EXPECT_LE((Eigen::VectorXd(p.transpose() * w.values) - restrict_field(w, fine).values).lpNorm<Eigen::Infinity>(),
            1e-14);
}

TEST(Transfer, InjectionAndBoundaryZero) {
  const MeshLevel& fine = disk7().level(3);
  std::mt19937_64 rng(11);
  const NodalField w{3, viscogrid::testing::random_vector(fine.num_nodes(), rng)};
  const NodalField c = inject(w, fine);
  ASSERT_EQ(c.values.size(), fine.n_coarse);
  for (int i = 0; i < fine.n_coarse; ++i) EXPECT_EQ(c.values[i], w.values[i]);

  // Boundary-zero coarse fields stay boundary-zero after prolongation.
  NodalField v = viscogrid::testing::random_field(disk7().level(2), rng);
  const NodalField p = prolongate(v, fine);
  for (int i = 0; i < fine.num_nodes(); ++i) {
    if (fine.is_boundary[i]) {
      EXPECT_EQ(p.values[i], 0.0);
    }
  }
}

TEST(Transfer, LevelMismatchThrows) {
  const MeshLevel& fine = disk7().level(3);
  const NodalField wrong{3, Eigen::VectorXd::Zero(fine.num_nodes())};
  EXPECT_THROW(prolongate(wrong, fine), ArgumentError);
  const NodalField short_field{3, Eigen::VectorXd::Zero(10)};
  EXPECT_THROW(restrict_field(short_field, fine), ArgumentError);
  EXPECT_THROW(prolongate(NodalField::zeros(disk7().level(0)), disk7().level(0)), ArgumentError);
}

TEST(Mesh, CorruptedLevelFailsInvariants) {
  MeshLevel m = disk7().level(2);
  std::swap(m.triangles[0][1], m.triangles[0][2]);  // clockwise
  EXPECT_THROW(m.check_invariants(), StructuralError);
}
