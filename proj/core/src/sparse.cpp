#include "viscogrid/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "viscogrid/error.hpp"

namespace viscogrid {

namespace {

constexpr double kResidualTol = 1e-10;

}  // namespace

AssemblyPattern::AssemblyPattern(const MeshLevel& mesh) {
  const int n = mesh.num_free();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(9 * mesh.triangles.size());
  for (const Triangle& tri : mesh.triangles) {
    for (int a = 0; a < 3; ++a) {
      const int row = mesh.free_index[tri[a]];
      if (row < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int col = mesh.free_index[tri[b]];
        if (col >= 0) entries.emplace_back(row, col, 0.0);
      }
    }
  }
  structure_.resize(n, n);
  structure_.setFromTriplets(entries.begin(), entries.end());
  structure_.makeCompressed();

  const int* outer = structure_.outerIndexPtr();
  const int* inner = structure_.innerIndexPtr();
  slots_.assign(9 * mesh.triangles.size(), -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      const int row = mesh.free_index[tri[a]];
      if (row < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int col = mesh.free_index[tri[b]];
        if (col < 0) continue;
        // Column-major: column `col` holds sorted row indices.
        const int* first = inner + outer[col];
        const int* last = inner + outer[col + 1];
        const int* hit = std::lower_bound(first, last, row);
        slots_[9 * t + 3 * a + b] = static_cast<int>(hit - inner);
      }
    }
  }
}

SparseSymMatrix::SparseSymMatrix(std::shared_ptr<const AssemblyPattern> pattern)
    : pattern_(std::move(pattern)), matrix_(pattern_->structure()) {}

SparseSymMatrix::SparseSymMatrix(Eigen::SparseMatrix<double> matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw ArgumentError("SparseSymMatrix: matrix is not square");
  const Eigen::SparseMatrix<double> transposed = matrix_.transpose();
  if ((matrix_ - transposed).norm() != 0.0) throw ArgumentError("SparseSymMatrix: matrix is not symmetric");
  matrix_.makeCompressed();
}

void SparseSymMatrix::add_element(int t, const Eigen::Matrix3d& block) {
  if (!pattern_) throw ArgumentError("add_element: matrix has no assembly pattern");
  double* values = matrix_.valuePtr();
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const int s = pattern_->slot(t, a, b);
      if (s >= 0) values[s] += block(a, b);
    }
  }
}

void SpdSolver::factorize(const SparseSymMatrix& a) {
  if (!analyzed_ || a.pattern() == nullptr || a.pattern() != analyzed_for_) {
    llt_.analyzePattern(a.matrix());
    analyzed_for_ = a.pattern();
    analyzed_ = true;
  }
  llt_.factorize(a.matrix());
  if (llt_.info() != Eigen::Success) {
    matrix_.reset();
    throw NumericError("SpdSolver: non-positive pivot in Cholesky factorization of a " +
                       std::to_string(a.size()) + "x" + std::to_string(a.size()) +
                       " matrix (not positive definite)");
  }
  matrix_ = std::make_shared<const Eigen::SparseMatrix<double>>(a.matrix());
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& b) const {
  if (!matrix_) throw NumericError("SpdSolver: solve called before a successful factorization");
  if (b.size() != matrix_->rows()) throw ArgumentError("SpdSolver: right-hand side has wrong size");
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());
  if (!std::isfinite(bnorm)) throw NumericError("SpdSolver: right-hand side is not finite");

  Eigen::VectorXd w = llt_.solve(b);
  Eigen::VectorXd residual = b - (*matrix_) * w;
  // At most two passes of iterative refinement.
  for (int pass = 0; pass < 2 && residual.norm() > kResidualTol * bnorm; ++pass) {
    w += llt_.solve(residual);
    residual = b - (*matrix_) * w;
  }
  const double rel = residual.norm() / bnorm;
  if (!(rel <= kResidualTol)) {
    throw NumericError("SpdSolver: relative residual " + std::to_string(rel) + " exceeds 1e-10");
  }
  return w;
}

Eigen::VectorXd solve_spd(const SparseSymMatrix& a, const Eigen::VectorXd& b) {
  SpdSolver solver(a);
  return solver.solve(b);
}

}  // namespace viscogrid
