#pragma once

#include <vector>

#include "mograsp/geometry.hpp"

namespace mograsp {

/// Coulomb point-contact friction; the cone half-angle is arctan(mu).
struct FrictionModel {
  double mu = 0.0;
  double alpha = 0.0;

  static FrictionModel from_mu(double mu);
};

/// A candidate contact on a polygon boundary. The admissible inward
/// normals span the angle interval [normal_lo, normal_hi]: a degenerate
/// interval for edge-interior contacts, the full inter-edge fan for
/// vertex contacts. normal_hi may exceed pi; the interval is unwrapped.
struct ContactPoint {
  Point2 position;
  double normal_lo = 0.0;
  double normal_hi = 0.0;

  bool is_vertex() const { return normal_hi - normal_lo > kAngleEps; }
};

struct StablePair {
  ContactPoint left;
  ContactPoint right;
  double diameter = 0.0;
};

/// True iff the line through both contact positions lies inside both
/// friction cones (cones widened over the normal span for vertex
/// contacts). Throws DegenerateInput for coincident positions.
bool is_equilibrium_pair(const ContactPoint& left, const ContactPoint& right,
                         const FrictionModel& friction);

/// Per edge, n_s points at fractions k/(n_s+1) with the edge's inward
/// normal as a degenerate span, plus one contact per vertex spanning the
/// inward normals of both incident edges. Edge contacts come first, in
/// edge order, then the vertex contacts.
std::vector<ContactPoint> sample_contacts(const ConvexPolygon& poly, int n_s);

/// Minimum diameter over all equilibrium pairs of the sampled contact
/// set; throws NoStableGrasp when no pair qualifies.
double min_stable_diameter(const ConvexPolygon& poly,
                           const FrictionModel& friction, int n_s);

/// Enumerates all equilibrium pairs (used by the planner caches and the
/// test oracles' cross-checks).
std::vector<StablePair> stable_pairs(const ConvexPolygon& poly,
                                     const FrictionModel& friction, int n_s);

/// Sum of per-member minimum stable diameters (the minimum final
/// multi-object grasp diameter of a chain).
double multi_object_min_diameter(const std::vector<ConvexPolygon>& group,
                                 const FrictionModel& friction, int n_s);

/// True iff all directions are pairwise parallel (sign-insensitive)
/// within tol_rad.
bool check_chain_colinearity(const std::vector<Vec2>& contact_lines,
                             double tol_rad = 1e-6);

}  // namespace mograsp
