#include "viscogrid/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "viscogrid/error.hpp"

namespace viscogrid {

RadialProfile RadialProfile::from_model(const ModelSpec& model) {
  model.validate();
  RadialProfile prof;
  prof.model = model;
  prof.r0 = 2.0 * model.g;
  prof.beta = 1.0 / (model.p() - 1.0);
  return prof;
}

double RadialProfile::plug_value() const { return profile_value(*this, 0.0); }

double profile_value(const RadialProfile& prof, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("profile_value: r = " + std::to_string(r) + " outside [0, 1]");
  const double r0 = prof.r0;
  if (r0 >= 1.0) return 0.0;
  const double s = std::max(r, r0);

  if (prof.model.is_casson()) {
    const double sq = std::sqrt(r0);
    if (r <= r0) return (3.0 - 8.0 * sq + 6.0 * r0 - r0 * r0) / 12.0;
    return 0.25 * (1.0 - r * r) - (2.0 / 3.0) * sq * (1.0 - std::pow(r, 1.5)) + 0.5 * r0 * (1.0 - r);
  }
  // Herschel-Bulkley; Bingham is beta = 1. The plug branch is the outer
  // branch evaluated at r0, i.e. normalized by (1 + beta).
  const double beta = prof.beta;
  const double scale = std::pow(2.0, beta) * (1.0 + beta);
  return (std::pow(1.0 - r0, 1.0 + beta) - std::pow(s - r0, 1.0 + beta)) / scale;
}

double plug_flow_numeric(const NodalField& u, const MeshLevel& mesh) {
  if (u.values.size() != mesh.num_nodes()) throw ArgumentError("plug_flow_numeric: field/mesh size mismatch");
  int best = 0;
  double best_r2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double r2 = mesh.nodes[i].x * mesh.nodes[i].x + mesh.nodes[i].y * mesh.nodes[i].y;
    if (r2 < best_r2) {
      best_r2 = r2;
      best = i;
    }
  }
  return u.values[best];
}

double err_pf(const NodalField& u, const RadialProfile& profile, const MeshLevel& mesh) {
  return std::abs(profile.plug_value() - plug_flow_numeric(u, mesh));
}

namespace {

double mass_form(const Eigen::VectorXd& e, const Eigen::SparseMatrix<double>& mass) {
  return std::max(0.0, e.dot(mass * e));
}

void check_pair(const NodalField& u, const NodalField& ref, int level, int n) {
  if (u.level != ref.level || u.level != level || u.values.size() != n || ref.values.size() != n) {
    throw ArgumentError("err_s: fields do not live on the same level");
  }
}

}  // namespace

double err_s(const NodalField& u, const NodalField& ref, const Discretization& disc) {
  check_pair(u, ref, disc.level(), disc.mesh().num_nodes());
  return mass_form(u.values - ref.values, disc.mass());
}

double err_s(const NodalField& u, const NodalField& ref, const MeshLevel& mesh) {
  check_pair(u, ref, mesh.level, mesh.num_nodes());
  return mass_form(u.values - ref.values, assemble_mass(mesh));
}

double l2_distance(const NodalField& u, const NodalField& ref, const Discretization& disc) {
  return std::sqrt(err_s(u, ref, disc));
}

}  // namespace viscogrid
