#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace viscogrid {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<int, 3>;

/// Coarse edge bisected by a midpoint node: (end(j,1), end(j,2)), first < second.
struct ParentPair {
  int first = 0;
  int second = 0;
};

/// One triangulation of the nested hierarchy.
///
/// Nodes `0 .. n_coarse-1` are the parent level's nodes in the same order;
/// nodes `n_coarse ..` are edge midpoints, and `parents[j - n_coarse]` names
/// the coarse edge each one bisects. Triangles are counterclockwise.
struct MeshLevel {
  int level = 0;
  std::vector<Point> nodes;
  std::vector<Triangle> triangles;
  std::vector<std::uint8_t> is_boundary;
  int n_coarse = 0;
  std::vector<ParentPair> parents;

  // Free (interior) numbering: free_index[i] is -1 on boundary nodes.
  std::vector<int> free_index;
  std::vector<int> free_nodes;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_free() const { return static_cast<int>(free_nodes.size()); }
  int num_boundary() const { return num_nodes() - num_free(); }

  double signed_area(int t) const;
  double total_area() const;

  /// Throws StructuralError if any invariant of a refined disk level fails.
  void check_invariants() const;
};

/// Real value per node of one level.
///
/// Fields that represent elements of the homogeneous-Dirichlet space
/// (iterates, directions, gradients) are zero on boundary nodes.
struct NodalField {
  int level = 0;
  Eigen::VectorXd values;

  static NodalField zeros(const MeshLevel& mesh) {
    return {mesh.level, Eigen::VectorXd::Zero(mesh.num_nodes())};
  }
};

/// Center plus four boundary points at angles 0, pi/2, pi, 3pi/2; four triangles.
MeshLevel build_unit_disk_coarse();

/// Regular 1-to-4 subdivision; boundary-edge midpoints are projected onto the
/// unit circle. Midpoints are appended in lexicographic parent-pair order.
MeshLevel refine(const MeshLevel& coarse);

class MeshHierarchy {
 public:
  /// `num_levels` grids of the unit disk, levels 0 .. num_levels-1.
  static MeshHierarchy unit_disk(int num_levels);

  explicit MeshHierarchy(std::vector<MeshLevel> levels);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const MeshLevel& level(int k) const { return levels_.at(k); }
  const MeshLevel& finest() const { return levels_.back(); }
  const MeshLevel& coarsest() const { return levels_.front(); }
  const std::vector<MeshLevel>& levels() const { return levels_; }

  /// The finest `count` levels, renumbered from 0.
  MeshHierarchy finest_levels(int count) const;

 private:
  std::vector<MeshLevel> levels_;
};

/// Coarse-to-fine interpolation: copy inherited nodes, average parents at midpoints.
NodalField prolongate(const NodalField& coarse_values, const MeshLevel& fine);

/// Fine-to-coarse transfer, the exact transpose of `prolongate`.
/// `fine` is the level `w` lives on; the result lives on `fine.level - 1`.
NodalField restrict_field(const NodalField& w, const MeshLevel& fine);

/// Pointwise injection onto the inherited nodes.
NodalField inject(const NodalField& w, const MeshLevel& fine);

/// Explicit prolongation matrix (fine.num_nodes() x fine.n_coarse); testing only.
Eigen::SparseMatrix<double> prolongation_matrix(const MeshLevel& fine);

/// Zero the boundary entries of a field in place.
void apply_dirichlet_mask(const MeshLevel& mesh, Eigen::VectorXd& values);

}  // namespace viscogrid
