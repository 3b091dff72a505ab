#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "viscogrid/mesh.hpp"

namespace viscogrid {

/// Sparsity of the P1 operators of one level restricted to the free nodes,
/// plus the storage slot of every local element entry. Shared by all
/// matrices assembled on that level.
class AssemblyPattern {
 public:
  explicit AssemblyPattern(const MeshLevel& mesh);

  int size() const { return static_cast<int>(structure_.rows()); }
  const Eigen::SparseMatrix<double>& structure() const { return structure_; }

  /// Value slot of local entry (a, b) of triangle t, or -1 if either vertex
  /// is a boundary node.
  int slot(int t, int a, int b) const { return slots_[9 * t + 3 * a + b]; }

 private:
  Eigen::SparseMatrix<double> structure_;
  std::vector<int> slots_;
};

/// Symmetric sparse operator on free-node vectors. Both triangles are stored.
class SparseSymMatrix {
 public:
  explicit SparseSymMatrix(std::shared_ptr<const AssemblyPattern> pattern);

  /// Wraps an arbitrary matrix; throws ArgumentError unless square and symmetric.
  explicit SparseSymMatrix(Eigen::SparseMatrix<double> matrix);

  int size() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  const AssemblyPattern* pattern() const { return pattern_.get(); }

  /// Scatter a symmetric 3x3 element block of triangle t (pattern-backed only).
  void add_element(int t, const Eigen::Matrix3d& block);

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix_ * x; }
  double quadratic_form(const Eigen::VectorXd& v) const { return v.dot(matrix_ * v); }

 private:
  std::shared_ptr<const AssemblyPattern> pattern_;
  Eigen::SparseMatrix<double> matrix_;
};

/// Sparse Cholesky for SPD matrices. The symbolic analysis is kept between
/// factorizations of matrices sharing one AssemblyPattern.
class SpdSolver {
 public:
  SpdSolver() = default;
  explicit SpdSolver(const SparseSymMatrix& a) { factorize(a); }

  /// Throws NumericError when a non-positive pivot shows up.
  void factorize(const SparseSymMatrix& a);

  /// Returns w with ||Aw - b|| <= 1e-10 ||b||; throws NumericError otherwise.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  bool factorized() const { return matrix_ != nullptr; }

 private:
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
  const AssemblyPattern* analyzed_for_ = nullptr;
  bool analyzed_ = false;
  std::shared_ptr<const Eigen::SparseMatrix<double>> matrix_;
};

Eigen::VectorXd solve_spd(const SparseSymMatrix& a, const Eigen::VectorXd& b);

}  // namespace viscogrid
