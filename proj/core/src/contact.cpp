#include "mograsp/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mograsp/errors.hpp"

namespace mograsp {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Angular distance from angle psi to the unwrapped interval [lo, hi].
double angle_to_span(double psi, double lo, double hi) {
  const double span = hi - lo;
  double t = std::fmod(psi - lo, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t <= span) return 0.0;
  return std::min(t - span, kTwoPi - t);
}

bool cone_contains(const ContactPoint& c, Vec2 dir, double alpha) {
  const double psi = std::atan2(dir.y, dir.x);
  return angle_to_span(psi, c.normal_lo, c.normal_hi) <= alpha + kAngleEps;
}

}  // namespace

FrictionModel FrictionModel::from_mu(double mu) {
  if (!(mu >= 0.0 && mu <= 2.0)) {
    throw DegenerateInput("friction coefficient must be in [0, 2]");
  }
  return FrictionModel{mu, std::atan(mu)};
}

bool is_equilibrium_pair(const ContactPoint& left, const ContactPoint& right,
                         const FrictionModel& friction) {
  const Vec2 delta = right.position - left.position;
  if (norm(delta) <= 1e-6) {
    throw DegenerateInput("contact positions coincide");
  }
  const Vec2 d = normalized(delta);
  return cone_contains(left, d, friction.alpha) &&
         cone_contains(right, -d, friction.alpha);
}

std::vector<ContactPoint> sample_contacts(const ConvexPolygon& poly, int n_s) {
  if (n_s < 1) throw DegenerateInput("contact sample count must be >= 1");
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  std::vector<ContactPoint> out;
  out.reserve(n * static_cast<std::size_t>(n_s) + n);

  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    const Vec2 inward = rot90(normalized(b - a));
    const double phi = std::atan2(inward.y, inward.x);
    for (int k = 1; k <= n_s; ++k) {
      const double f = static_cast<double>(k) / (n_s + 1);
      out.push_back(ContactPoint{a + (b - a) * f, phi, phi});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 prev = v[(i + n - 1) % n];
    const Point2 next = v[(i + 1) % n];
    const Vec2 t_in = normalized(v[i] - prev);
    const Vec2 t_out = normalized(next - v[i]);
    const Vec2 n_in = rot90(t_in);
    const double lo = std::atan2(n_in.y, n_in.x);
    // Normals rotate CCW by the exterior angle across a convex vertex.
    const double ext = std::atan2(cross(t_in, t_out), dot(t_in, t_out));
    out.push_back(ContactPoint{v[i], lo, lo + ext});
  }
  return out;
}

std::vector<StablePair> stable_pairs(const ConvexPolygon& poly,
                                     const FrictionModel& friction, int n_s) {
  const std::vector<ContactPoint> contacts = sample_contacts(poly, n_s);
  std::vector<StablePair> pairs;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    for (std::size_t j = i + 1; j < contacts.size(); ++j) {
      const double d = distance(contacts[i].position, contacts[j].position);
      if (d <= 1e-6) continue;
      if (is_equilibrium_pair(contacts[i], contacts[j], friction)) {
        pairs.push_back(StablePair{contacts[i], contacts[j], d});
      }
    }
  }
  return pairs;
}

double min_stable_diameter(const ConvexPolygon& poly,
                           const FrictionModel& friction, int n_s) {
  const std::vector<ContactPoint> contacts = sample_contacts(poly, n_s);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    for (std::size_t j = i + 1; j < contacts.size(); ++j) {
      const double d = distance(contacts[i].position, contacts[j].position);
      if (d <= 1e-6 || d >= best) continue;
      if (is_equilibrium_pair(contacts[i], contacts[j], friction)) {
        best = d;
      }
    }
  }
  if (!std::isfinite(best)) {
    throw NoStableGrasp("no sampled contact pair is in equilibrium");
  }
  return best;
}

double multi_object_min_diameter(const std::vector<ConvexPolygon>& group,
                                 const FrictionModel& friction, int n_s) {
  if (group.empty()) throw DegenerateInput("object group is empty");
  double sum = 0.0;
  for (const ConvexPolygon& poly : group) {
    sum += min_stable_diameter(poly, friction, n_s);
  }
  return sum;
}

bool check_chain_colinearity(const std::vector<Vec2>& contact_lines,
                             double tol_rad) {
  if (contact_lines.empty()) {
    throw DegenerateInput("colinearity check needs >= 1 direction");
  }
  std::vector<Vec2> dirs;
  dirs.reserve(contact_lines.size());
  for (const Vec2& v : contact_lines) dirs.push_back(normalized(v));
  const double lim = std::sin(std::min(tol_rad, M_PI / 2.0));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      if (std::abs(cross(dirs[i], dirs[j])) > lim + kAngleEps) return false;
    }
  }
  return true;
}

}  // namespace mograsp
