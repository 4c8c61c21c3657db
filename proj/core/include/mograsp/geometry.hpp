#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mograsp {

// All lengths are millimetres, all angles radians.
inline constexpr double kCoincidenceEps = 1e-9;  // mm, point coincidence
inline constexpr double kOrientationEps = 1e-6;  // mm^2, strict-convexity crosses
inline constexpr double kAngleEps = 1e-9;        // rad, cone boundary comparisons

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  Point2 operator-() const { return {-x, -y}; }
};
using Vec2 = Point2;

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
/// Rotates v by +90 degrees. For a CCW boundary this turns an edge
/// direction into the inward normal.
inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }
Vec2 normalized(Vec2 v);

/// Wraps an angle into [-pi, pi).
double normalize_angle(double a);

struct Segment {
  Point2 a;
  Point2 b;
};

/// Planar pose; theta is kept in [-pi, pi).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  static Pose2 make(double x, double y, double theta);
  Point2 position() const { return {x, y}; }
  Point2 apply(Point2 p) const;
};

/// Rectangle given by center, unit closing axis, and half extents:
/// half_width along the axis, half_length across it (along the jaw faces).
struct OrientedRect {
  Point2 center;
  Vec2 axis{1.0, 0.0};
  double half_width = 0.0;
  double half_length = 0.0;

  std::array<Point2, 4> corners() const;  // CCW
};

/// Strictly convex CCW polygon. Validated construction goes through
/// from_points (1e-6 convexity tolerance, used for object models);
/// derived polygons (clips, hulls) are cleaned with try_normalize which
/// only removes coincident and collinear vertices.
class ConvexPolygon {
public:
  static ConvexPolygon from_points(std::vector<Point2> ccw_vertices);
  static std::optional<ConvexPolygon> try_normalize(std::span<const Point2> loop);

  const std::vector<Point2>& vertices() const { return verts_; }
  std::size_t size() const { return verts_.size(); }
  Point2 vertex(std::size_t i) const { return verts_[i]; }

  double area() const;
  Point2 centroid() const;
  /// Positive inside, negative outside: distance to the nearest edge line.
  double signed_interior_distance(Point2 p) const;
  bool contains(Point2 p, double tol = kCoincidenceEps) const;
  Point2 support(Vec2 dir) const;
  /// Extent of the projection onto dir (dir need not be unit; it is normalized).
  double extent(Vec2 dir) const;
  double diameter() const;
  double min_width() const;

  ConvexPolygon translated(Vec2 d) const;
  ConvexPolygon transformed(const Pose2& pose) const;

private:
  explicit ConvexPolygon(std::vector<Point2> v) : verts_(std::move(v)) {}
  std::vector<Point2> verts_;
};

/// Minimal convex CCW polygon containing all points; collinear interior
/// points removed. Throws DegenerateInput when all points are collinear.
ConvexPolygon convex_hull(std::span<const Point2> points);

/// Successive half-plane clipping against the rectangle's four edges.
/// Returns nullopt when the intersection has (near-)zero area.
std::optional<ConvexPolygon> clip_polygon_to_rect(const ConvexPolygon& poly,
                                                  const OrientedRect& rect);

double polygon_area(const ConvexPolygon& poly);

double min_distance(const Segment& a, const Segment& b);
double min_distance(const ConvexPolygon& poly, const Segment& seg);
double min_distance(const ConvexPolygon& a, const ConvexPolygon& b);

/// Deterministic axis-aligned grid covering the hull with at least n
/// interior points; the pitch is bisected so the count is the closest
/// achievable value >= n.
std::vector<Point2> uniform_cover_points(const ConvexPolygon& hull, int n);

namespace detail {

inline constexpr int kClipCapacity = 64;

// Allocation-free clip for the planner hot path. Returns the vertex count
// written to out (capacity must be >= in_count + 4). The output loop may
// contain coincident points; area/extent computations tolerate that.
int clip_to_rect_raw(const Point2* in, int in_count, const OrientedRect& rect,
                     Point2* out);
double loop_area(const Point2* v, int n);
void loop_extent(const Point2* v, int n, Vec2 dir, double& lo, double& hi);

}  // namespace detail

}  // namespace mograsp
