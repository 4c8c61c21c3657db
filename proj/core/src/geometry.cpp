#include "mograsp/geometry.hpp"

#include <algorithm>
#include <limits>

#include "mograsp/errors.hpp"

namespace mograsp {

Vec2 normalized(Vec2 v) {
  const double n = norm(v);
  if (n < kCoincidenceEps) {
    throw DegenerateInput("cannot normalize a near-zero vector");
  }
  return {v.x / n, v.y / n};
}

double normalize_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  double r = std::fmod(a + M_PI, two_pi);
  if (r < 0.0) r += two_pi;
  return r - M_PI;
}

Pose2 Pose2::make(double x, double y, double theta) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(theta)) {
    throw DegenerateInput("pose requires finite coordinates");
  }
  return Pose2{x, y, normalize_angle(theta)};
}

Point2 Pose2::apply(Point2 p) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {x + c * p.x - s * p.y, y + s * p.x + c * p.y};
}

std::array<Point2, 4> OrientedRect::corners() const {
  const Vec2 u = axis * half_width;
  const Vec2 v = rot90(axis) * half_length;
  return {center - u - v, center + u - v, center + u + v, center - u + v};
}

namespace {

double turn(Point2 o, Point2 a, Point2 b) { return cross(a - o, b - o); }

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

ConvexPolygon ConvexPolygon::from_points(std::vector<Point2> v) {
  if (v.size() < 3) {
    throw DegenerateInput("polygon needs at least 3 vertices");
  }
  for (const Point2& p : v) {
    if (!finite(p)) throw DegenerateInput("polygon vertex is not finite");
  }
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    const Point2 c = v[(i + 2) % n];
    if (turn(a, b, c) <= kOrientationEps) {
      throw DegenerateInput("polygon is not strictly convex CCW");
    }
  }
  return ConvexPolygon(std::move(v));
}

std::optional<ConvexPolygon> ConvexPolygon::try_normalize(
    std::span<const Point2> loop) {
  std::vector<Point2> v;
  v.reserve(loop.size());
  for (const Point2& p : loop) {
    if (v.empty() || distance(v.back(), p) > kCoincidenceEps) {
      v.push_back(p);
    }
  }
  while (v.size() > 1 && distance(v.front(), v.back()) <= kCoincidenceEps) {
    v.pop_back();
  }
  // Drop collinear vertices until stable.
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const std::size_t n = v.size();
      const Point2 prev = v[(i + n - 1) % n];
      const Point2 next = v[(i + 1) % n];
      if (turn(prev, v[i], next) <= kCoincidenceEps) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (v.size() < 3) return std::nullopt;
  if (detail::loop_area(v.data(), static_cast<int>(v.size())) <= kCoincidenceEps) {
    return std::nullopt;
  }
  return ConvexPolygon(std::move(v));
}

double ConvexPolygon::area() const {
  return detail::loop_area(verts_.data(), static_cast<int>(verts_.size()));
}

Point2 ConvexPolygon::centroid() const {
  // Area-weighted centroid of the polygon.
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = verts_[i];
    const Point2 q = verts_[(i + 1) % n];
    const double w = cross(p, q);
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

double ConvexPolygon::signed_interior_distance(Point2 p) const {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = verts_[i];
    const Point2 b = verts_[(i + 1) % n];
    const double len = distance(a, b);
    d = std::min(d, cross(b - a, p - a) / len);
  }
  return d;
}

bool ConvexPolygon::contains(Point2 p, double tol) const {
  return signed_interior_distance(p) >= -tol;
}

Point2 ConvexPolygon::support(Vec2 dir) const {
  Point2 best = verts_[0];
  double best_d = dot(best, dir);
  for (const Point2& p : verts_) {
    const double d = dot(p, dir);
    if (d > best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

double ConvexPolygon::extent(Vec2 dir) const {
  const Vec2 u = normalized(dir);
  double lo, hi;
  detail::loop_extent(verts_.data(), static_cast<int>(verts_.size()), u, lo, hi);
  return hi - lo;
}

double ConvexPolygon::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    for (std::size_t j = i + 1; j < verts_.size(); ++j) {
      best = std::max(best, distance(verts_[i], verts_[j]));
    }
  }
  return best;
}

double ConvexPolygon::min_width() const {
  // Width of a convex polygon is attained with one side flush against an edge.
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = verts_[i];
    const Point2 b = verts_[(i + 1) % n];
    const Vec2 t = normalized(b - a);
    double farthest = 0.0;
    for (const Point2& p : verts_) {
      farthest = std::max(farthest, cross(t, p - a));
    }
    best = std::min(best, farthest);
  }
  return best;
}

ConvexPolygon ConvexPolygon::translated(Vec2 d) const {
  std::vector<Point2> v = verts_;
  for (Point2& p : v) p = p + d;
  return ConvexPolygon(std::move(v));
}

ConvexPolygon ConvexPolygon::transformed(const Pose2& pose) const {
  std::vector<Point2> v = verts_;
  for (Point2& p : v) p = pose.apply(p);
  return ConvexPolygon(std::move(v));
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  if (pts.size() < 3) throw DegenerateInput("convex hull needs >= 3 points");
  for (const Point2& p : pts) {
    if (!finite(p)) throw DegenerateInput("hull input point is not finite");
  }
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Point2 a, Point2 b) {
                          return distance(a, b) <= kCoincidenceEps;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) throw DegenerateInput("convex hull input collapses to < 3 points");

  // Andrew's monotone chain; collinear points are dropped.
  std::vector<Point2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= kCoincidenceEps) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= kCoincidenceEps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  auto out = ConvexPolygon::try_normalize(hull);
  if (!out) throw DegenerateInput("hull input is collinear");
  return *out;
}

namespace detail {

double loop_area(const Point2* v, int n) {
  double a2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point2 p = v[i];
    const Point2 q = v[(i + 1) % n];
    a2 += cross(p, q);
  }
  return 0.5 * a2;
}

void loop_extent(const Point2* v, int n, Vec2 dir, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (int i = 0; i < n; ++i) {
    const double d = dot(v[i], dir);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
}

int clip_to_rect_raw(const Point2* in, int in_count, const OrientedRect& rect,
                     Point2* out) {
  // Half-planes: inward normal and offset for each rectangle side.
  const Vec2 u = rect.axis;
  const Vec2 v = rot90(u);
  const struct {
    Vec2 n;
    double c;
  } planes[4] = {
      {u, dot(u, rect.center) - rect.half_width},
      {-u, -(dot(u, rect.center) + rect.half_width)},
      {v, dot(v, rect.center) - rect.half_length},
      {-v, -(dot(v, rect.center) + rect.half_length)},
  };

  Point2 buf_a[kClipCapacity];
  Point2 buf_b[kClipCapacity];
  Point2* cur = buf_a;
  Point2* nxt = buf_b;
  int n = in_count;
  for (int i = 0; i < n; ++i) cur[i] = in[i];

  for (const auto& pl : planes) {
    int m = 0;
    for (int i = 0; i < n; ++i) {
      const Point2 p = cur[i];
      const Point2 q = cur[(i + 1) % n];
      const double dp = dot(pl.n, p) - pl.c;
      const double dq = dot(pl.n, q) - pl.c;
      if (dp >= 0.0) nxt[m++] = p;
      if ((dp > 0.0 && dq < 0.0) || (dp < 0.0 && dq > 0.0)) {
        const double t = dp / (dp - dq);
        nxt[m++] = p + (q - p) * t;
      }
    }
    std::swap(cur, nxt);
    n = m;
    if (n == 0) break;
  }
  for (int i = 0; i < n; ++i) out[i] = cur[i];
  return n;
}

}  // namespace detail

std::optional<ConvexPolygon> clip_polygon_to_rect(const ConvexPolygon& poly,
                                                  const OrientedRect& rect) {
  const int n = static_cast<int>(poly.size());
  if (n + 8 > detail::kClipCapacity) {
    throw DegenerateInput("polygon too large for clipping buffer");
  }
  Point2 out[detail::kClipCapacity];
  const int m =
      detail::clip_to_rect_raw(poly.vertices().data(), n, rect, out);
  if (m < 3) return std::nullopt;
  return ConvexPolygon::try_normalize(std::span<const Point2>(out, m));
}

double polygon_area(const ConvexPolygon& poly) { return poly.area(); }

namespace {

double point_segment_distance(Point2 p, const Segment& s) {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 <= kCoincidenceEps * kCoincidenceEps) return distance(p, s.a);
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return distance(p, s.a + d * t);
}

bool segments_intersect(const Segment& s, const Segment& t) {
  const double d1 = turn(s.a, s.b, t.a);
  const double d2 = turn(s.a, s.b, t.b);
  const double d3 = turn(t.a, t.b, s.a);
  const double d4 = turn(t.a, t.b, s.b);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

double min_distance(const Segment& a, const Segment& b) {
  if (segments_intersect(a, b)) return 0.0;
  double d = point_segment_distance(a.a, b);
  d = std::min(d, point_segment_distance(a.b, b));
  d = std::min(d, point_segment_distance(b.a, a));
  d = std::min(d, point_segment_distance(b.b, a));
  return d;
}

double min_distance(const ConvexPolygon& poly, const Segment& seg) {
  if (poly.contains(seg.a) || poly.contains(seg.b)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Segment e{poly.vertex(i), poly.vertex((i + 1) % n)};
    d = std::min(d, min_distance(e, seg));
    if (d == 0.0) return 0.0;
  }
  return d;
}

double min_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.contains(b.vertex(0)) || b.contains(a.vertex(0))) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Segment e{a.vertex(i), a.vertex((i + 1) % n)};
    d = std::min(d, min_distance(b, e));
    if (d == 0.0) return 0.0;
  }
  return d;
}

std::vector<Point2> uniform_cover_points(const ConvexPolygon& hull, int n) {
  if (n < 1) throw DegenerateInput("cover point count must be >= 1");
  if (hull.area() < 1.0) {
    throw DegenerateInput("hull area below 1 mm^2");
  }

  double min_x, max_x, min_y, max_y;
  detail::loop_extent(hull.vertices().data(), static_cast<int>(hull.size()),
                      {1.0, 0.0}, min_x, max_x);
  detail::loop_extent(hull.vertices().data(), static_cast<int>(hull.size()),
                      {0.0, 1.0}, min_y, max_y);

  auto collect = [&](double pitch, std::vector<Point2>* out) -> int {
    int count = 0;
    for (double y = min_y + 0.5 * pitch; y < max_y; y += pitch) {
      for (double x = min_x + 0.5 * pitch; x < max_x; x += pitch) {
        const Point2 p{x, y};
        if (hull.signed_interior_distance(p) > kCoincidenceEps) {
          ++count;
          if (out) out->push_back(p);
        }
      }
    }
    return count;
  };

  // Largest pitch still yielding >= n interior points, found by bisection.
  double hi = std::max(max_x - min_x, max_y - min_y);
  double lo = std::sqrt(hull.area() / static_cast<double>(n)) / 16.0;
  while (collect(lo, nullptr) < n) {
    lo *= 0.5;
    if (lo < 1e-6) throw DegenerateInput("hull too thin to cover");
  }
  double best = lo;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (collect(mid, nullptr) >= n) {
      best = std::max(best, mid);
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<Point2> pts;
  collect(best, &pts);
  return pts;
}

}  // namespace mograsp
