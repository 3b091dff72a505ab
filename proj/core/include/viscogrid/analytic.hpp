#pragma once

#include "viscogrid/fem.hpp"
#include "viscogrid/mesh.hpp"

namespace viscogrid {

/// Closed-form axial velocity of steady pipe flow (unit radius, unit
/// pressure drop) for the three yield-stress models. The plug radius is
/// r0 = 2g; for r0 >= 1 the fluid does not move.
struct RadialProfile {
  ModelSpec model;
  double r0 = 0.0;
  double beta = 1.0;  ///< 1/(p-1), Herschel-Bulkley and Bingham

  static RadialProfile from_model(const ModelSpec& model);

  /// Velocity inside the plug, u(0).
  double plug_value() const;
};

/// u(r) for 0 <= r <= 1; throws ArgumentError otherwise.
double profile_value(const RadialProfile& profile, double r);

/// Value at the node nearest the origin.
double plug_flow_numeric(const NodalField& u, const MeshLevel& mesh);

/// |u_plug(analytic) - u_plug(numeric)|.
double err_pf(const NodalField& u, const RadialProfile& profile, const MeshLevel& mesh);

/// Solution error (u-ref)^T M (u-ref), M the P1 mass matrix. This is the
/// square of the discrete L2 distance; the tabulated values are on this scale.
double err_s(const NodalField& u, const NodalField& ref, const Discretization& disc);
double err_s(const NodalField& u, const NodalField& ref, const MeshLevel& mesh);

/// sqrt(err_s).
double l2_distance(const NodalField& u, const NodalField& ref, const Discretization& disc);

}  // namespace viscogrid
