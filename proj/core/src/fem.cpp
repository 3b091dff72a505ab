#include "viscogrid/fem.hpp"

#include <cmath>
#include <string>

#include "viscogrid/error.hpp"

namespace viscogrid {

namespace {

void check_field(const NodalField& u, const Discretization& disc, const char* what) {
  if (u.level != disc.level() || u.values.size() != disc.mesh().num_nodes()) {
    throw ArgumentError(std::string(what) + ": field does not live on level " + std::to_string(disc.level()));
  }
  if (!u.values.allFinite()) throw NumericError(std::string(what) + ": field has non-finite values");
}

/// (1+r)^s - 1 - s r, accurate for small |r|.
double power_remainder(double r, double s) {
  if (std::abs(r) < 0.25) {
    double term = s * (s - 1.0) / 2.0 * r * r;
    double sum = term;
    for (int k = 3; k < 80 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
      term *= (s - k + 1) / k * r;
      sum += term;
    }
    return sum;
  }
  return std::pow(1.0 + r, s) - 1.0 - s * r;
}

/// Phi(b+d) - Phi(b) - flux(b).d for |z|^{2s}: |b|^{2s} (h_s(r) + s t),
/// r = (|a|^2 - |b|^2)/|b|^2, t = |d|^2/|b|^2.
double norm_power_remainder(double b2, double r, double t, double s) {
  return std::pow(b2, s) * (power_remainder(r, s) + s * t);
}

/// Energy density of the model at a constant element gradient.
double energy_density(const Eigen::Vector2d& z, const ModelSpec& model, double p) {
  const double n2 = z.squaredNorm();
  double value = p == 2.0 ? 0.5 * n2 : std::pow(n2, 0.5 * p) / p;
  value += huber_value(z, model.g, model.gamma);
  if (model.is_casson()) value += (4.0 / 3.0) * std::sqrt(model.g) * std::pow(n2, 0.75);
  return value;
}

/// Derivative of the energy density: |z|^{p-2} z + g gamma z / max(g, gamma|z|) (+ Casson term).
Eigen::Vector2d flux(const Eigen::Vector2d& z, const ModelSpec& model, double p) {
  const double nz = z.norm();
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  if (nz > 0.0) {
    q = (p == 2.0 ? 1.0 : std::pow(nz, p - 2.0)) * z;
    if (model.is_casson() && model.g > 0.0) q += 2.0 * std::sqrt(model.g) / std::sqrt(nz) * z;
  }
  if (model.g > 0.0) q += model.g * model.gamma / std::max(model.g, model.gamma * nz) * z;
  return q;
}

/// Slant derivative of `flux` as a 2x2 tangent.
Eigen::Matrix2d tangent(const Eigen::Vector2d& z, const ModelSpec& model, double p) {
  const double raw = z.norm();
  const double nz = std::max(raw, kHessianClamp);
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d zz = z * z.transpose();

  Eigen::Matrix2d k = (p == 2.0) ? id : Eigen::Matrix2d(std::pow(nz, p - 2.0) * id + (p - 2.0) * std::pow(nz, p - 4.0) * zz);
  const double g = model.g;
  if (g > 0.0) {
    if (model.gamma * raw >= g) {
      k += (g / nz) * id - (g / (nz * nz * nz)) * zz;
    } else {
      k += model.gamma * id;
    }
    if (model.is_casson()) {
      const double sg = std::sqrt(g);
      k += 2.0 * sg * (std::pow(nz, -0.5) * id - 0.5 * std::pow(nz, -2.5) * zz);
    }
  }
  return k;
}

double preconditioner_weight(const Eigen::Vector2d& z, const ModelSpec& model, double eps, CassonWeight casson) {
  if (model.is_casson()) {
    const double w = 1.0 / std::sqrt(eps + z.norm());
    return casson == CassonWeight::power ? w : 1.0 + std::sqrt(model.g) * w;
  }
  const double p = model.p();
  if (p < 2.0) return std::pow(eps + z.norm(), p - 2.0);
  return 1.0;
}

const NodalField& no_shift(const Discretization& disc) {
  thread_local NodalField zero;
  if (zero.level != disc.level() || zero.values.size() != disc.mesh().num_nodes()) {
    zero = NodalField::zeros(disc.mesh());
  }
  return zero;
}

}  // namespace

// ---------------------------------------------------------------------------
// ModelSpec
// ---------------------------------------------------------------------------

ModelSpec ModelSpec::herschel_bulkley(double p, double g, double gamma, double f) {
  ModelSpec m{HerschelBulkley{p}, g, gamma, f};
  m.validate();
  return m;
}

ModelSpec ModelSpec::bingham(double g, double gamma, double f) {
  ModelSpec m{Bingham{}, g, gamma, f};
  m.validate();
  return m;
}

ModelSpec ModelSpec::casson(double g, double gamma, double f) {
  ModelSpec m{Casson{}, g, gamma, f};
  m.validate();
  return m;
}

double ModelSpec::p() const {
  if (const auto* hb = std::get_if<HerschelBulkley>(&variant)) return hb->p;
  return 2.0;
}

std::string ModelSpec::name() const {
  if (std::holds_alternative<HerschelBulkley>(variant)) return "hb";
  if (std::holds_alternative<Bingham>(variant)) return "bingham";
  return "casson";
}

void ModelSpec::validate() const {
  const double power = p();
  if (!std::isfinite(power) || !(power > 1.0)) throw ArgumentError("ModelSpec: p must be > 1");
  if (!std::isfinite(gamma) || !(gamma > 0.0)) throw ArgumentError("ModelSpec: gamma must be > 0");
  if (!std::isfinite(g) || g < 0.0) throw ArgumentError("ModelSpec: g must be >= 0");
  if (!std::isfinite(f)) throw ArgumentError("ModelSpec: f must be finite");
}

// ---------------------------------------------------------------------------
// Discretization
// ---------------------------------------------------------------------------

ElementGeometry element_geometry(const Point& a, const Point& b, const Point& c) {
  ElementGeometry geo;
  const double twice_area = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  geo.area = 0.5 * twice_area;
  geo.grad << b.y - c.y, c.y - a.y, a.y - b.y,  //
      c.x - b.x, a.x - c.x, b.x - a.x;
  geo.grad /= twice_area;
  return geo;
}

Discretization::Discretization(MeshLevel mesh)
    : mesh_(std::move(mesh)),
      pattern_(std::make_shared<const AssemblyPattern>(mesh_)),
      stiffness_(pattern_) {
  elements_.reserve(mesh_.triangles.size());
  for (const Triangle& tri : mesh_.triangles) {
    elements_.push_back(element_geometry(mesh_.nodes[tri[0]], mesh_.nodes[tri[1]], mesh_.nodes[tri[2]]));
    if (!(elements_.back().area > 0.0)) throw StructuralError("Discretization: degenerate triangle");
  }
  stiffness_ = assemble_stiffness(*this);
  if (stiffness_.size() > 0) stiffness_solver_.factorize(stiffness_);
  mass_ = assemble_mass(mesh_);
  unit_load_ = assemble_load(mesh_, 1.0).values;
}

Eigen::Vector2d Discretization::element_gradient(const Eigen::VectorXd& u, int t) const {
  const Triangle& tri = mesh_.triangles[t];
  const Eigen::Matrix<double, 2, 3>& g = elements_[t].grad;
  return g.col(0) * u[tri[0]] + g.col(1) * u[tri[1]] + g.col(2) * u[tri[2]];
}

Eigen::VectorXd Discretization::to_free(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(mesh_.num_free());
  for (int i = 0; i < mesh_.num_free(); ++i) out[i] = full[mesh_.free_nodes[i]];
  return out;
}

Eigen::VectorXd Discretization::to_full(const Eigen::VectorXd& free) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh_.num_nodes());
  for (int i = 0; i < mesh_.num_free(); ++i) out[mesh_.free_nodes[i]] = free[i];
  return out;
}

// ---------------------------------------------------------------------------
// Energy and derivatives
// ---------------------------------------------------------------------------

double huber_value(const Eigen::Vector2d& z, double g, double gamma) {
  const double nz = z.norm();
  if (nz > g / gamma) return g * nz - g * g / (2.0 * gamma);
  return 0.5 * gamma * nz * nz;
}

std::vector<std::uint8_t> active_set(const NodalField& u, const ModelSpec& model, const Discretization& disc) {
  check_field(u, disc, "active_set");
  std::vector<std::uint8_t> active(disc.mesh().triangles.size());
  for (int t = 0; t < disc.mesh().num_triangles(); ++t) {
    active[t] = model.gamma * disc.element_gradient(u.values, t).norm() >= model.g ? 1 : 0;
  }
  return active;
}

double eval_energy(const NodalField& u, const ModelSpec& model, const Discretization& disc) {
  return eval_energy(u, model, disc, no_shift(disc));
}

double eval_energy(const NodalField& u, const ModelSpec& model, const Discretization& disc, const NodalField& fhat) {
  check_field(u, disc, "eval_energy");
  check_field(fhat, disc, "eval_energy (shift)");
  const double p = model.p();
  double energy = 0.0;
  for (int t = 0; t < disc.mesh().num_triangles(); ++t) {
    energy += disc.elements()[t].area * energy_density(disc.element_gradient(u.values, t), model, p);
  }
  double linear = 0.0;
  for (int i : disc.mesh().free_nodes) linear += (model.f * disc.unit_load()[i] + fhat.values[i]) * u.values[i];
  return energy - linear;
}

double eval_energy_change(const NodalField& u, const NodalField& w, double alpha, const ModelSpec& model,
                          const Discretization& disc, const NodalField& fhat) {
  const double slope = eval_gradient(u, model, disc, fhat).values.dot(w.values);
  return eval_energy_change(u, w, alpha, model, disc, fhat, slope);
}

double eval_energy_change(const NodalField& u, const NodalField& w, double alpha, const ModelSpec& model,
                          const Discretization& disc, const NodalField& fhat, double slope) {
  check_field(u, disc, "eval_energy_change");
  check_field(w, disc, "eval_energy_change (direction)");
  check_field(fhat, disc, "eval_energy_change (shift)");
  if (!std::isfinite(alpha) || !std::isfinite(slope)) throw NumericError("eval_energy_change: non-finite step");
  const double p = model.p();
  const double g = model.g;
  const double gamma = model.gamma;
  const bool casson = model.is_casson() && g > 0.0;
  const double threshold2 = (g / gamma) * (g / gamma);

  // J(u + alpha w) - J(u) = alpha grad^T w + sum_T area * (Phi(b+d) - Phi(b) - flux(b).d);
  // the element remainders are second order and evaluated without cancellation.
  double remainder = 0.0;
  for (int t = 0; t < disc.mesh().num_triangles(); ++t) {
    const Eigen::Vector2d b = disc.element_gradient(u.values, t);
    const Eigen::Vector2d d = alpha * disc.element_gradient(w.values, t);
    const double b2 = b.squaredNorm();
    const double d2 = d.squaredNorm();
    if (d2 == 0.0) continue;
    double local;
    if (b2 == 0.0) {
      const Eigen::Vector2d a = d;
      local = energy_density(a, model, p);
    } else {
      const double bd = b.dot(d);
      const double r = (2.0 * bd + d2) / b2;
      const double tt = d2 / b2;
      local = p == 2.0 ? 0.5 * d2 : norm_power_remainder(b2, r, tt, 0.5 * p) / p;
      if (g > 0.0) {
        const double a2 = b2 * (1.0 + r);
        const bool a_quadratic = a2 <= threshold2;
        const bool b_quadratic = b2 <= threshold2;
        if (a_quadratic && b_quadratic) {
          local += 0.5 * gamma * d2;
        } else if (!a_quadratic && !b_quadratic) {
          local += g * norm_power_remainder(b2, r, tt, 0.5);
        } else {
          const Eigen::Vector2d a = b + d;
          const double linear = g * gamma / std::max(g, gamma * std::sqrt(b2)) * bd;
          local += huber_value(a, g, gamma) - huber_value(b, g, gamma) - linear;
        }
        if (casson) local += (4.0 / 3.0) * std::sqrt(g) * norm_power_remainder(b2, r, tt, 0.75);
      }
    }
    remainder += disc.elements()[t].area * local;
  }
  return alpha * slope + remainder;
}

NodalField eval_gradient(const NodalField& u, const ModelSpec& model, const Discretization& disc) {
  return eval_gradient(u, model, disc, no_shift(disc));
}

NodalField eval_gradient(const NodalField& u, const ModelSpec& model, const Discretization& disc,
                         const NodalField& fhat) {
  check_field(u, disc, "eval_gradient");
  check_field(fhat, disc, "eval_gradient (shift)");
  const double p = model.p();
  NodalField grad{disc.level(), -(model.f * disc.unit_load() + fhat.values)};
  for (int t = 0; t < disc.mesh().num_triangles(); ++t) {
    const ElementGeometry& geo = disc.elements()[t];
    const Eigen::Vector2d q = flux(disc.element_gradient(u.values, t), model, p);
    const Eigen::Vector3d local = geo.area * (geo.grad.transpose() * q);
    const Triangle& tri = disc.mesh().triangles[t];
    for (int a = 0; a < 3; ++a) grad.values[tri[a]] += local[a];
  }
  apply_dirichlet_mask(disc.mesh(), grad.values);
  return grad;
}

SparseSymMatrix assemble_slant_hessian(const NodalField& u, const ModelSpec& model, const Discretization& disc) {
  check_field(u, disc, "assemble_slant_hessian");
  const double p = model.p();
  SparseSymMatrix h(disc.pattern());
  for (int t = 0; t < disc.mesh().num_triangles(); ++t) {
    const ElementGeometry& geo = disc.elements()[t];
    const Eigen::Matrix2d k = tangent(disc.element_gradient(u.values, t), model, p);
    h.add_element(t, geo.area * (geo.grad.transpose() * k * geo.grad));
  }
  return h;
}

bool preconditioner_is_constant(const ModelSpec& model) { return !model.is_casson() && model.p() >= 2.0; }

SparseSymMatrix assemble_preconditioner(const NodalField& u, const ModelSpec& model, const Discretization& disc,
                                        double eps, CassonWeight casson) {
  check_field(u, disc, "assemble_preconditioner");
  if (!preconditioner_is_constant(model) && !(eps > 0.0)) {
    throw ArgumentError("assemble_preconditioner: eps must be > 0 when p < 2 or for Casson");
  }
  SparseSymMatrix pr(disc.pattern());
  for (int t = 0; t < disc.mesh().num_triangles(); ++t) {
    const ElementGeometry& geo = disc.elements()[t];
    const double weight = preconditioner_weight(disc.element_gradient(u.values, t), model, eps, casson);
    pr.add_element(t, (weight * geo.area) * (geo.grad.transpose() * geo.grad));
  }
  return pr;
}

SparseSymMatrix assemble_stiffness(const Discretization& disc) {
  SparseSymMatrix a(disc.pattern());
  for (int t = 0; t < disc.mesh().num_triangles(); ++t) {
    const ElementGeometry& geo = disc.elements()[t];
    a.add_element(t, geo.area * (geo.grad.transpose() * geo.grad));
  }
  return a;
}

Eigen::SparseMatrix<double> assemble_mass(const MeshLevel& mesh) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double area = mesh.signed_area(t);
    const Triangle& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) entries.emplace_back(tri[a], tri[b], area * (a == b ? 2.0 : 1.0) / 12.0);
    }
  }
  Eigen::SparseMatrix<double> m(mesh.num_nodes(), mesh.num_nodes());
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

NodalField assemble_load(const MeshLevel& mesh, double f) {
  if (!std::isfinite(f)) throw NumericError("assemble_load: non-finite load");
  NodalField load = NodalField::zeros(mesh);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double share = mesh.signed_area(t) * f / 3.0;
    for (int v : mesh.triangles[t]) load.values[v] += share;
  }
  return load;
}

NodalField poisson_solve(const Discretization& disc, double f) {
  if (!std::isfinite(f)) throw NumericError("poisson_solve: non-finite load");
  const Eigen::VectorXd rhs = disc.to_free(f * disc.unit_load());
  return {disc.level(), disc.to_full(disc.stiffness_solver().solve(rhs))};
}

}  // namespace viscogrid
