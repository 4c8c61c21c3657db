#include "mograsp/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mograsp/errors.hpp"
#include "mograsp/parallel.hpp"
#include "mograsp/random.hpp"

namespace mograsp {

OrientedRect gripper_interior(const GraspAction& action,
                              const GripperSpec& spec, double width) {
  if (width < 0.0 || width > spec.max_width + kCoincidenceEps) {
    throw DegenerateInput("gripper width outside [0, max_width]");
  }
  const double th = action.pose.theta;
  return OrientedRect{action.pose.position(),
                      Vec2{std::cos(th), std::sin(th)},
                      0.5 * width,
                      0.5 * spec.jaw_length};
}

std::pair<OrientedRect, OrientedRect> jaw_footprints(const GraspAction& action,
                                                     const GripperSpec& spec) {
  const double th = action.pose.theta;
  const Vec2 u{std::cos(th), std::sin(th)};
  const double off = 0.5 * spec.max_width + 0.5 * spec.jaw_thickness;
  const Point2 c = action.pose.position();
  OrientedRect left{c - u * off, u, 0.5 * spec.jaw_thickness,
                    0.5 * spec.jaw_length};
  OrientedRect right{c + u * off, u, 0.5 * spec.jaw_thickness,
                     0.5 * spec.jaw_length};
  return {left, right};
}

namespace {

// Positive-area overlap between a polygon and a rectangle.
bool overlaps_rect(const ConvexPolygon& poly, const OrientedRect& rect) {
  Point2 buf[detail::kClipCapacity];
  const int m = detail::clip_to_rect_raw(
      poly.vertices().data(), static_cast<int>(poly.size()), rect, buf);
  if (m < 3) return false;
  return detail::loop_area(buf, m) > kCoincidenceEps;
}

double clip_area(const ConvexPolygon& poly, const OrientedRect& rect) {
  Point2 buf[detail::kClipCapacity];
  const int m = detail::clip_to_rect_raw(
      poly.vertices().data(), static_cast<int>(poly.size()), rect, buf);
  if (m < 3) return 0.0;
  return std::max(0.0, detail::loop_area(buf, m));
}

}  // namespace

std::vector<GraspAction> gen_grasp_cands(const Scene& scene,
                                         const ObjectGroup& group,
                                         const GripperSpec& spec, int n_p,
                                         int n_theta) {
  if (group.members.empty()) throw DegenerateInput("empty object group");
  std::vector<Point2> pts;
  for (int idx : group.members) {
    const auto& v = scene.at(static_cast<std::size_t>(idx)).vertices();
    pts.insert(pts.end(), v.begin(), v.end());
  }
  const ConvexPolygon hull = convex_hull(pts);
  const std::vector<Point2> centers = uniform_cover_points(hull, n_p);

  std::vector<GraspAction> cands;
  cands.reserve(centers.size() * static_cast<std::size_t>(n_theta));
  for (const Point2& c : centers) {
    for (int j = 0; j < n_theta; ++j) {
      const double theta = M_PI * static_cast<double>(j) / n_theta;
      GraspAction action{Pose2::make(c.x, c.y, theta)};
      const auto [left, right] = jaw_footprints(action, spec);
      bool collides = false;
      for (const ConvexPolygon& obj : scene) {
        if (overlaps_rect(obj, left) || overlaps_rect(obj, right)) {
          collides = true;
          break;
        }
      }
      if (!collides) cands.push_back(action);
    }
  }
  return cands;
}

namespace detail {

MinDiameterCache::MinDiameterCache(const Scene& scene,
                                   const FrictionModel& friction, int n_s) {
  diameters_.reserve(scene.size());
  for (const ConvexPolygon& poly : scene) {
    diameters_.push_back(min_stable_diameter(poly, friction, n_s));
  }
}

double MinDiameterCache::object_diameter(int index) const {
  return diameters_.at(static_cast<std::size_t>(index));
}

double MinDiameterCache::group_sum(const ObjectGroup& group) const {
  double sum = 0.0;
  for (int idx : group.members) sum += object_diameter(idx);
  return sum;
}

bool conditions_hold(const std::vector<ConvexPolygon>& members,
                     const OrientedRect& interior, double h_star) {
  // Clip every member; track the extreme clips by centroid projection.
  // Clips lie inside the rectangle laterally, so the distance from a clip
  // to a jaw face equals the axis-projection gap.
  const Vec2 u = interior.axis;
  const double center_proj = dot(u, interior.center);
  const double left_face = center_proj - interior.half_width;
  const double right_face = center_proj + interior.half_width;

  double first_centroid = std::numeric_limits<double>::infinity();
  double last_centroid = -first_centroid;
  double first_lo = 0.0;
  double last_hi = 0.0;

  Point2 buf[kClipCapacity];
  for (const ConvexPolygon& poly : members) {
    const int m = clip_to_rect_raw(poly.vertices().data(),
                                   static_cast<int>(poly.size()), interior, buf);
    if (m < 3) return false;
    const double area = loop_area(buf, m);
    if (area <= kCoincidenceEps) return false;  // Eq. 4

    double lo, hi;
    loop_extent(buf, m, u, lo, hi);
    double cx = 0.0, cy = 0.0;
    for (int i = 0; i < m; ++i) {
      cx += buf[i].x;
      cy += buf[i].y;
    }
    const double cproj = dot(u, Point2{cx / m, cy / m});
    if (cproj < first_centroid) {
      first_centroid = cproj;
      first_lo = lo;
    }
    if (cproj > last_centroid) {
      last_centroid = cproj;
      last_hi = hi;
    }
  }

  const double b_l = std::max(0.0, first_lo - left_face);
  const double b_r = std::max(0.0, right_face - last_hi);
  const double h0 = 2.0 * interior.half_width - (b_l + b_r);
  return h0 + kCoincidenceEps >= h_star;  // Eq. 5
}

}  // namespace detail

bool check_necessary_conditions(const Scene& scene, const ObjectGroup& group,
                                const GraspAction& action,
                                const GripperSpec& spec,
                                const FrictionModel& friction, int n_s) {
  if (group.members.empty()) throw DegenerateInput("empty object group");
  std::vector<ConvexPolygon> members;
  members.reserve(group.members.size());
  double h_star = 0.0;
  for (int idx : group.members) {
    const ConvexPolygon& poly = scene.at(static_cast<std::size_t>(idx));
    members.push_back(poly);
    h_star += min_stable_diameter(poly, friction, n_s);
  }
  const OrientedRect interior = gripper_interior(action, spec, spec.max_width);
  return detail::conditions_hold(members, interior, h_star);
}

double total_intersection_area(const Scene& scene, const ObjectGroup& group,
                               const GraspAction& action,
                               const GripperSpec& spec) {
  const OrientedRect interior = gripper_interior(action, spec, spec.max_width);
  double total = 0.0;
  for (int idx : group.members) {
    total += clip_area(scene.at(static_cast<std::size_t>(idx)), interior);
  }
  return total;
}

namespace {

double proba_with_cache(const Scene& scene, const ObjectGroup& group,
                        const GraspAction& action, const GripperSpec& spec,
                        const NoiseModel& noise, double h_star) {
  if (noise.n_mc < 1) throw DegenerateInput("n_mc must be >= 1");
  std::mt19937_64 rng = make_rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<ConvexPolygon> members;
  members.reserve(group.members.size());
  for (int idx : group.members) {
    members.push_back(scene.at(static_cast<std::size_t>(idx)));
  }

  int satisfied = 0;
  std::vector<ConvexPolygon> perturbed;
  perturbed.reserve(members.size());
  for (int s = 0; s < noise.n_mc; ++s) {
    const double dux = gauss(rng) * noise.sigma_u_x;
    const double duy = gauss(rng) * noise.sigma_u_y;
    const double dut = gauss(rng) * noise.sigma_u_theta;
    GraspAction perturbed_action{Pose2::make(action.pose.x + dux,
                                             action.pose.y + duy,
                                             action.pose.theta + dut)};
    perturbed.clear();
    for (const ConvexPolygon& poly : members) {
      const Vec2 d{gauss(rng) * noise.sigma_x, gauss(rng) * noise.sigma_x};
      perturbed.push_back(poly.translated(d));
    }
    const OrientedRect interior =
        gripper_interior(perturbed_action, spec, spec.max_width);
    if (detail::conditions_hold(perturbed, interior, h_star)) ++satisfied;
  }
  return static_cast<double>(satisfied) / noise.n_mc;
}

}  // namespace

double necessary_conds_proba(const Scene& scene, const ObjectGroup& group,
                             const GraspAction& action,
                             const GripperSpec& spec,
                             const FrictionModel& friction,
                             const NoiseModel& noise, int n_s) {
  double h_star = 0.0;
  for (int idx : group.members) {
    h_star +=
        min_stable_diameter(scene.at(static_cast<std::size_t>(idx)), friction, n_s);
  }
  return proba_with_cache(scene, group, action, spec, noise, h_star);
}

PlanResult plan_grasp_detailed(const Scene& scene, const ObjectGroup& group,
                               const GripperSpec& spec,
                               const FrictionModel& friction,
                               const NoiseModel& noise,
                               const Predictor& predictor, int n_p,
                               int n_theta, int n_s, int jobs) {
  PlanResult result;
  const std::vector<GraspAction> cands =
      gen_grasp_cands(scene, group, spec, n_p, n_theta);
  if (cands.empty()) return result;

  double h_star = 0.0;
  for (int idx : group.members) {
    h_star +=
        min_stable_diameter(scene.at(static_cast<std::size_t>(idx)), friction, n_s);
  }

  result.evals.resize(cands.size());
  parallel_for_indexed(cands.size(), jobs, [&](std::size_t k) {
    NoiseModel cand_noise = noise;
    cand_noise.seed = derive_seed(noise.seed, static_cast<std::uint64_t>(k));
    CandidateEval ev;
    ev.action = cands[k];
    ev.gamma =
        proba_with_cache(scene, group, cands[k], spec, cand_noise, h_star);
    // A zero-probability grasp scores zero regardless of the prediction,
    // so the predictor is only queried when it can matter.
    ev.n_g_pred =
        ev.gamma > 0.0 ? predictor(scene, group, cands[k]) : 0.0;
    ev.score = ev.gamma * ev.n_g_pred;
    result.evals[k] = ev;
  });

  double best = 0.0;
  for (std::size_t k = 0; k < result.evals.size(); ++k) {
    if (result.evals[k].score > best) {
      best = result.evals[k].score;
      result.best_index = static_cast<int>(k);
    }
  }
  return result;
}

std::optional<std::pair<GraspAction, double>> robust_grasp_planner(
    const Scene& scene, const ObjectGroup& group, const GripperSpec& spec,
    const FrictionModel& friction, const NoiseModel& noise,
    const Predictor& predictor, int n_p, int n_theta, int n_s, int jobs) {
  const PlanResult result = plan_grasp_detailed(
      scene, group, spec, friction, noise, predictor, n_p, n_theta, n_s, jobs);
  if (result.best_index < 0) return std::nullopt;
  const CandidateEval& best =
      result.evals[static_cast<std::size_t>(result.best_index)];
  return std::make_pair(best.action, best.n_g_pred);
}

}  // namespace mograsp
