#pragma once

#include <cmath>
#include <random>

#include "viscogrid/fem.hpp"
#include "viscogrid/mesh.hpp"

namespace viscogrid::testing {

/// The seven-level disk hierarchy, built once per process.
inline const MeshHierarchy& disk7() {
  static const MeshHierarchy h = MeshHierarchy::unit_disk(7);
  return h;
}

/// Uniform(-scale, scale) values on free nodes, zero on the boundary.
inline NodalField random_field(const MeshLevel& mesh, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  NodalField u = NodalField::zeros(mesh);
  for (int i : mesh.free_nodes) u.values[i] = dist(rng);
  return u;
}

/// Uniform values on every node (for transfer tests).
inline Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

/// Triangle (0,0),(1,0),(0,1); node 0 is a boundary node so the free
/// stiffness block is nonsingular.
inline MeshLevel reference_triangle() {
  MeshLevel m;
  m.nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.triangles = {{0, 1, 2}};
  m.is_boundary = {1, 0, 0};
  m.free_index = {-1, 0, 1};
  m.free_nodes = {1, 2};
  return m;
}

inline double rel_inf(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace viscogrid::testing
