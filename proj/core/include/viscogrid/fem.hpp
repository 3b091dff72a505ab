#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "viscogrid/mesh.hpp"
#include "viscogrid/sparse.hpp"

namespace viscogrid {

// ---------------------------------------------------------------------------
// Fluid models
// ---------------------------------------------------------------------------

struct HerschelBulkley {
  double p = 2.0;
};
struct Bingham {};
struct Casson {};

using FluidModel = std::variant<HerschelBulkley, Bingham, Casson>;

/// Energy  phi(grad u) + int psi_gamma(grad u) - int f u  for one fluid model.
///
/// Bingham evaluates exactly as Herschel-Bulkley with p = 2. Casson adds
/// (4/3) sqrt(g) int |grad u|^{3/2} to the p = 2 energy.
struct ModelSpec {
  FluidModel variant = Bingham{};
  double g = 0.0;      ///< yield stress
  double gamma = 1e3;  ///< Huber parameter
  double f = 1.0;      ///< constant load

  static ModelSpec herschel_bulkley(double p, double g, double gamma = 1e3, double f = 1.0);
  static ModelSpec bingham(double g, double gamma = 1e3, double f = 1.0);
  static ModelSpec casson(double g, double gamma = 1e3, double f = 1.0);

  /// Exponent of the viscous term (2 for Bingham and Casson).
  double p() const;
  bool is_casson() const { return std::holds_alternative<Casson>(variant); }
  std::string name() const;

  /// Throws ArgumentError for p <= 1, gamma <= 0, g < 0 or non-finite values.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Discretization of one level
// ---------------------------------------------------------------------------

/// Area and constant shape-function gradients of one P1 triangle.
/// Column i of `grad` is grad(phi_i); the columns sum to zero.
struct ElementGeometry {
  double area = 0.0;
  Eigen::Matrix<double, 2, 3> grad;
};

/// Per-level data shared by every assembly on that level: element geometry,
/// the free-node sparsity pattern, the stiffness and mass matrices and a
/// factorized stiffness matrix. Immutable after construction.
class Discretization {
 public:
  explicit Discretization(MeshLevel mesh);

  const MeshLevel& mesh() const { return mesh_; }
  int level() const { return mesh_.level; }
  const std::vector<ElementGeometry>& elements() const { return elements_; }
  const std::shared_ptr<const AssemblyPattern>& pattern() const { return pattern_; }

  /// Stiffness (Laplacian) matrix on free nodes.
  const SparseSymMatrix& stiffness() const { return stiffness_; }
  const SpdSolver& stiffness_solver() const { return stiffness_solver_; }

  /// P1 mass matrix on all nodes.
  const Eigen::SparseMatrix<double>& mass() const { return mass_; }

  /// Load vector for f = 1 on all nodes (area/3 per incident triangle).
  const Eigen::VectorXd& unit_load() const { return unit_load_; }

  Eigen::Vector2d element_gradient(const Eigen::VectorXd& u, int t) const;

  Eigen::VectorXd to_free(const Eigen::VectorXd& full) const;
  Eigen::VectorXd to_full(const Eigen::VectorXd& free) const;

 private:
  MeshLevel mesh_;
  std::vector<ElementGeometry> elements_;
  std::shared_ptr<const AssemblyPattern> pattern_;
  SparseSymMatrix stiffness_;
  SpdSolver stiffness_solver_;
  Eigen::SparseMatrix<double> mass_;
  Eigen::VectorXd unit_load_;
};

ElementGeometry element_geometry(const Point& a, const Point& b, const Point& c);

// ---------------------------------------------------------------------------
// Energy, gradient, slant Hessian
// ---------------------------------------------------------------------------

/// Huber regularization of the Euclidean norm:
/// g|z| - g^2/(2 gamma) for |z| > g/gamma, (gamma/2)|z|^2 otherwise.
double huber_value(const Eigen::Vector2d& z, double g, double gamma);

/// Per-triangle flag gamma |grad u|_T >= g.
std::vector<std::uint8_t> active_set(const NodalField& u, const ModelSpec& model, const Discretization& disc);

/// J(u) - fhat^T u. Passing no shift evaluates the plain problem.
double eval_energy(const NodalField& u, const ModelSpec& model, const Discretization& disc);
double eval_energy(const NodalField& u, const ModelSpec& model, const Discretization& disc,
                   const NodalField& fhat);

/// J(u + alpha w) - J(u) for the shifted energy, evaluated as
/// alpha * grad^T w plus element-wise second-order remainders. Keeps full
/// relative accuracy near a minimizer, where J(u + alpha w) and J(u) agree
/// to far more digits than a double holds.
double eval_energy_change(const NodalField& u, const NodalField& w, double alpha, const ModelSpec& model,
                          const Discretization& disc, const NodalField& fhat);
/// Same, with the slope grad^T w already known.
double eval_energy_change(const NodalField& u, const NodalField& w, double alpha, const ModelSpec& model,
                          const Discretization& disc, const NodalField& fhat, double slope);

/// Nodal gradient of the shifted energy; boundary entries are zero.
NodalField eval_gradient(const NodalField& u, const ModelSpec& model, const Discretization& disc);
NodalField eval_gradient(const NodalField& u, const ModelSpec& model, const Discretization& disc,
                         const NodalField& fhat);

/// Guard for the negative powers of |grad u| in the slant Hessian.
inline constexpr double kHessianClamp = 1e-12;

SparseSymMatrix assemble_slant_hessian(const NodalField& u, const ModelSpec& model, const Discretization& disc);

/// Element weight of the Casson preconditioner.
enum class CassonWeight {
  power,  ///< (eps+|grad u|)^{-1/2}, the 1 < p < 2 branch with p = 3/2
  sum,    ///< 1 + sqrt(g)(eps+|grad u|)^{-1/2}, following the two energy terms
};

/// Descent preconditioner: weighted Laplacian with weight (eps+|grad u|)^{p-2}
/// for 1 < p < 2, plain Laplacian for p >= 2, see CassonWeight for Casson.
SparseSymMatrix assemble_preconditioner(const NodalField& u, const ModelSpec& model, const Discretization& disc,
                                        double eps, CassonWeight casson = CassonWeight::power);

/// True when the preconditioner does not depend on u (plain Laplacian).
bool preconditioner_is_constant(const ModelSpec& model);

// ---------------------------------------------------------------------------
// Auxiliary assemblies
// ---------------------------------------------------------------------------

SparseSymMatrix assemble_stiffness(const Discretization& disc);
Eigen::SparseMatrix<double> assemble_mass(const MeshLevel& mesh);
NodalField assemble_load(const MeshLevel& mesh, double f);

/// FE solution of -Laplace(u) = f with homogeneous Dirichlet data.
NodalField poisson_solve(const Discretization& disc, double f);

}  // namespace viscogrid
