#include "mograsp/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <random>

#include "mograsp/errors.hpp"
#include "mograsp/random.hpp"

namespace mograsp {

const char* to_string(ObjectFate fate) {
  switch (fate) {
    case ObjectFate::retained: return "retained";
    case ObjectFate::never_contacted: return "never_contacted";
    case ObjectFate::squeezed_out: return "squeezed_out";
    case ObjectFate::jaw_collision: return "jaw_collision";
  }
  return "?";
}

namespace {

struct ChainSlot {
  int index = -1;            // scene index
  double lo = 0.0;           // clip extent along the closing axis
  double hi = 0.0;
  double centroid_proj = 0.0;
  double contain_ratio = 0.0;
  ContactPoint support_lo;
  ContactPoint support_hi;
  double diameter = 0.0;
  Vec2 line{1.0, 0.0};
  bool has_supports = false;
};

bool rect_contains(const OrientedRect& rect, Point2 p, double tol) {
  const Vec2 v = rot90(rect.axis);
  const Vec2 d = p - rect.center;
  return std::abs(dot(rect.axis, d)) <= rect.half_width + tol &&
         std::abs(dot(v, d)) <= rect.half_length + tol;
}

// Support pair of the squeeze: boundary samples inside the region that
// are extremal along the closing axis. The object settles while the jaws
// close, so every sample within settle_band of the extremes is a contact
// candidate; among those the pair most aligned with the axis wins.
void find_supports(const ConvexPolygon& poly, const OrientedRect& rect,
                   int n_s, double settle_band, ChainSlot& slot) {
  const Vec2 u = rect.axis;
  const Vec2 v = rot90(u);
  const std::vector<ContactPoint> contacts = sample_contacts(poly, n_s);

  struct Cand {
    const ContactPoint* contact;
    double proj;
    double lat;
  };
  std::vector<Cand> inside;
  double ext_lo = std::numeric_limits<double>::infinity();
  double ext_hi = -ext_lo;
  for (const ContactPoint& c : contacts) {
    if (!rect_contains(rect, c.position, 1e-9)) continue;
    const double proj = dot(u, c.position - rect.center);
    inside.push_back({&c, proj, dot(v, c.position - rect.center)});
    ext_lo = std::min(ext_lo, proj);
    ext_hi = std::max(ext_hi, proj);
  }
  if (inside.empty() || ext_hi - ext_lo <= 1e-6) return;

  const double min_span = std::max(1e-6, 0.5 * (ext_hi - ext_lo));
  double best_sin = std::numeric_limits<double>::infinity();
  double best_center = 0.0;
  bool found = false;
  const ContactPoint* pick_lo = nullptr;
  const ContactPoint* pick_hi = nullptr;
  for (const Cand& a : inside) {
    if (a.proj > ext_lo + settle_band) continue;
    for (const Cand& b : inside) {
      if (b.proj < ext_hi - settle_band) continue;
      if (b.proj - a.proj < min_span) continue;
      const Vec2 d = b.contact->position - a.contact->position;
      const double len = norm(d);
      if (len <= 1e-6) continue;
      const double tilt = std::abs(cross(u, d)) / len;
      const double center_off = std::abs(a.lat) + std::abs(b.lat);
      if (tilt < best_sin - 1e-12 ||
          (tilt <= best_sin + 1e-12 && center_off < best_center - 1e-12)) {
        best_sin = tilt;
        best_center = center_off;
        pick_lo = a.contact;
        pick_hi = b.contact;
        found = true;
      }
    }
  }
  if (!found) return;
  slot.support_lo = *pick_lo;
  slot.support_hi = *pick_hi;
  slot.diameter = distance(pick_lo->position, pick_hi->position);
  slot.line = normalized(pick_hi->position - pick_lo->position);
  slot.has_supports = true;
}

}  // namespace

SimOutcome simulate_grasp(const Scene& scene, const GraspAction& action,
                          const GripperSpec& spec,
                          const FrictionModel& friction,
                          const NoiseModel& exec_noise,
                          const SimParams& params) {
  SimOutcome out;
  out.per_object.assign(scene.size(), ObjectFate::never_contacted);
  out.post_scene = scene;
  if (scene.empty()) return out;

  // 1. Executed grasp = planned grasp + control noise.
  std::mt19937_64 rng = make_rng(exec_noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double dux = gauss(rng) * exec_noise.sigma_u_x;
  const double duy = gauss(rng) * exec_noise.sigma_u_y;
  const double dut = gauss(rng) * exec_noise.sigma_u_theta;
  const GraspAction exec{Pose2::make(action.pose.x + dux, action.pose.y + duy,
                                     action.pose.theta + dut)};

  const OrientedRect interior = gripper_interior(exec, spec, spec.max_width);
  const auto [left_jaw, right_jaw] = jaw_footprints(exec, spec);
  const Vec2 u = interior.axis;
  const Vec2 v = rot90(u);
  const double center_proj = dot(u, interior.center);

  // 2. Jaw collisions get bumped out along the closing axis.
  std::vector<bool> excluded(scene.size(), false);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    Point2 buf[detail::kClipCapacity];
    const ConvexPolygon& obj = scene[i];
    bool hit = false;
    for (const OrientedRect& jaw : {left_jaw, right_jaw}) {
      const int m = detail::clip_to_rect_raw(
          obj.vertices().data(), static_cast<int>(obj.size()), jaw, buf);
      if (m >= 3 && detail::loop_area(buf, m) > kCoincidenceEps) {
        hit = true;
        break;
      }
    }
    if (!hit) continue;
    out.per_object[i] = ObjectFate::jaw_collision;
    excluded[i] = true;
    const double side =
        dot(u, obj.centroid() - interior.center) >= 0.0 ? 1.0 : -1.0;
    double lo, hi;
    detail::loop_extent(obj.vertices().data(), static_cast<int>(obj.size()), u,
                        lo, hi);
    const double outer =
        center_proj + interior.half_width + spec.jaw_thickness + 1.0;
    double shift = 0.0;
    if (side > 0.0) {
      shift = std::max(0.0, outer - lo);
    } else {
      shift = std::min(0.0, (2.0 * center_proj - outer) - hi);
    }
    out.post_scene[i] = obj.translated(u * shift);
  }

  // 3 & 4. Build the squeeze chain from objects inside the region.
  std::vector<ChainSlot> chain;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    if (excluded[i]) continue;
    const ConvexPolygon& obj = scene[i];
    Point2 buf[detail::kClipCapacity];
    const int m = detail::clip_to_rect_raw(
        obj.vertices().data(), static_cast<int>(obj.size()), interior, buf);
    if (m < 3) continue;
    const double area = detail::loop_area(buf, m);
    if (area <= kCoincidenceEps) continue;

    ChainSlot slot;
    slot.index = static_cast<int>(i);
    detail::loop_extent(buf, m, u, slot.lo, slot.hi);
    double cx = 0.0, cy = 0.0;
    for (int k = 0; k < m; ++k) {
      cx += buf[k].x;
      cy += buf[k].y;
    }
    slot.centroid_proj = dot(u, Point2{cx / m, cy / m});
    slot.contain_ratio = area / obj.area();
    find_supports(obj, interior, params.support_ns, params.settle_band, slot);
    chain.push_back(slot);
  }
  std::sort(chain.begin(), chain.end(), [](const ChainSlot& a, const ChainSlot& b) {
    return a.centroid_proj < b.centroid_proj ||
           (a.centroid_proj == b.centroid_proj && a.index < b.index);
  });
  for (const ChainSlot& s : chain) {
    out.per_object[static_cast<std::size_t>(s.index)] = ObjectFate::squeezed_out;
  }

  // Overlapping chain slots cannot squeeze in series; the widest one keeps
  // the load and the rest stay loose.
  std::vector<ChainSlot> kept;
  for (const ChainSlot& cur : chain) {
    bool drop = false;
    for (auto it = kept.begin(); it != kept.end();) {
      const bool overlap =
          cur.lo < it->hi - kCoincidenceEps && it->lo < cur.hi - kCoincidenceEps;
      if (!overlap) {
        ++it;
        continue;
      }
      if (cur.diameter > it->diameter) {
        it = kept.erase(it);
      } else {
        drop = true;
        break;
      }
    }
    if (!drop) kept.push_back(cur);
  }
  std::sort(kept.begin(), kept.end(), [](const ChainSlot& a, const ChainSlot& b) {
    return a.centroid_proj < b.centroid_proj ||
           (a.centroid_proj == b.centroid_proj && a.index < b.index);
  });

  // 5. Per-object hold tests.
  std::vector<bool> ok(kept.size(), false);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const ChainSlot& s = kept[k];
#ifdef MOGRASP_SIM_DEBUG
    std::fprintf(stderr,
                 "slot obj %d supports=%d contain=%.3f eq=%d d*=? extent=%.4f "
                 "diam=%.4f line=(%.4f,%.4f)\n",
                 s.index, s.has_supports ? 1 : 0, s.contain_ratio,
                 s.has_supports && is_equilibrium_pair(s.support_lo,
                                                       s.support_hi, friction)
                     ? 1
                     : 0,
                 s.hi - s.lo, s.diameter, s.line.x, s.line.y);
#endif
    if (!s.has_supports) continue;
    if (s.contain_ratio < params.tau_contain) continue;
    if (!is_equilibrium_pair(s.support_lo, s.support_hi, friction)) continue;
    // The squeeze travel must reach some stable width of the object.
    const ConvexPolygon& obj = scene[static_cast<std::size_t>(s.index)];
    const double d_star = min_stable_diameter(obj, friction, params.fit_ns);
    if (d_star > (s.hi - s.lo) + kCoincidenceEps) continue;
    ok[k] = true;
  }

  // Longest contiguous run of held objects whose connecting lines are
  // mutually colinear; earliest run wins ties.
  int best_start = -1, best_len = 0;
  for (std::size_t start = 0; start < kept.size(); ++start) {
    if (!ok[start]) continue;
    std::vector<Vec2> lines;
    for (std::size_t end = start; end < kept.size() && ok[end]; ++end) {
      lines.push_back(kept[end].line);
      if (!check_chain_colinearity(lines, params.colinearity_tol)) break;
      const int len = static_cast<int>(end - start + 1);
      if (len > best_len) {
        best_len = len;
        best_start = static_cast<int>(start);
      }
    }
  }

  std::vector<std::size_t> retained_slots;
  if (best_start >= 0) {
    for (int k = best_start; k < best_start + best_len; ++k) {
      retained_slots.push_back(static_cast<std::size_t>(k));
    }
  }

  // 6. Shed from the far end while the stack cannot fit in the opening.
  double width_sum = 0.0;
  for (std::size_t k : retained_slots) width_sum += kept[k].diameter;
  while (!retained_slots.empty() && width_sum > spec.max_width + kCoincidenceEps) {
    width_sum -= kept[retained_slots.back()].diameter;
    retained_slots.pop_back();
  }

  for (std::size_t k : retained_slots) {
    const ChainSlot& s = kept[k];
    out.per_object[static_cast<std::size_t>(s.index)] = ObjectFate::retained;
    out.retained.push_back(s.index);
    out.final_width += s.diameter;
  }
  std::sort(out.retained.begin(), out.retained.end());
  out.n_g = static_cast<int>(out.retained.size());

  // Squeezed-out objects slide sideways out of the closing jaws.
  for (const ChainSlot& s : chain) {
    const std::size_t i = static_cast<std::size_t>(s.index);
    if (out.per_object[i] != ObjectFate::squeezed_out) continue;
    const ConvexPolygon& obj = scene[i];
    const double side = dot(v, obj.centroid() - interior.center) >= 0.0 ? 1.0 : -1.0;
    out.post_scene[i] = obj.translated(v * (side * 1.2 * spec.jaw_length));
  }
  return out;
}

namespace {

ConvexPolygon random_polygon(std::mt19937_64& rng, const SceneSpec& spec) {
  std::uniform_int_distribution<int> vert_dist(spec.min_vertices,
                                               spec.max_vertices);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const int k = vert_dist(rng);
    const double radius =
        0.5 * (spec.min_size + (spec.max_size - spec.min_size) * unit(rng));
    std::vector<double> angles(static_cast<std::size_t>(k));
    for (double& a : angles) a = 2.0 * M_PI * unit(rng);
    std::sort(angles.begin(), angles.end());
    std::vector<Point2> pts;
    pts.reserve(angles.size());
    for (double a : angles) {
      const double r = radius * (0.7 + 0.3 * unit(rng));
      pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    try {
      ConvexPolygon hull = convex_hull(pts);
      if (hull.area() < 1.0) continue;
      // Re-validate against the strict object tolerance and recenter.
      std::vector<Point2> verts = hull.vertices();
      const Point2 c = hull.centroid();
      for (Point2& p : verts) p = p - c;
      return ConvexPolygon::from_points(std::move(verts));
    } catch (const DegenerateInput&) {
      continue;
    }
  }
  throw PlacementFailure("could not draw a valid random polygon");
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  if (spec.object_count < 0) throw DegenerateInput("negative object count");
  if (spec.min_vertices < 3 || spec.max_vertices > 8 ||
      spec.min_vertices > spec.max_vertices) {
    throw DegenerateInput("vertex counts must satisfy 3 <= min <= max <= 8");
  }
  std::mt19937_64 rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Scene scene;
  scene.reserve(static_cast<std::size_t>(spec.object_count));
  const double half_w = 0.5 * spec.region_width;
  const double half_h = 0.5 * spec.region_height;

  for (int i = 0; i < spec.object_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      const ConvexPolygon shape = random_polygon(rng, spec);
      Point2 pos;
      if (!scene.empty() && unit(rng) < spec.clustering) {
        std::uniform_int_distribution<std::size_t> pick(0, scene.size() - 1);
        const Point2 anchor = scene[pick(rng)].centroid();
        pos = anchor + Vec2{gauss(rng), gauss(rng)} * (0.9 * spec.max_size);
      } else {
        pos = {(-1.0 + 2.0 * unit(rng)) * half_w,
               (-1.0 + 2.0 * unit(rng)) * half_h};
      }
      const double rot = 2.0 * M_PI * unit(rng);
      const ConvexPolygon candidate =
          shape.transformed(Pose2::make(pos.x, pos.y, rot));

      bool ok = true;
      for (const Point2& p : candidate.vertices()) {
        if (std::abs(p.x) > half_w || std::abs(p.y) > half_h) {
          ok = false;
          break;
        }
      }
      for (std::size_t j = 0; ok && j < scene.size(); ++j) {
        if (min_distance(candidate, scene[j]) < spec.margin) ok = false;
      }
      if (ok) {
        scene.push_back(candidate);
        placed = true;
      }
    }
    if (!placed) {
      throw PlacementFailure("placement budget exhausted for object " +
                             std::to_string(i));
    }
  }
  return scene;
}

}  // namespace mograsp
