#include <doctest.h>

#include <cmath>
#include <random>

#include "mograsp/errors.hpp"
#include "mograsp/geometry.hpp"
#include "oracles.hpp"

using namespace mograsp;

namespace {

ConvexPolygon square(double side, Point2 lo = {0, 0}) {
  return ConvexPolygon::from_points(
      {lo, lo + Point2{side, 0}, lo + Point2{side, side}, lo + Point2{0, side}});
}

}  // namespace

TEST_CASE("convex hull drops interior and collinear points") {
  std::vector<Point2> pts = {{0, 0}, {100, 0}, {100, 100}, {0, 100}, {50, 50}};
  const ConvexPolygon hull = convex_hull(pts);
  CHECK(hull.size() == 4);
  CHECK(hull.area() == doctest::Approx(10000.0));

  std::vector<Point2> tri = {{0, 0}, {30, 0}, {0, 40}};
  CHECK(convex_hull(tri).size() == 3);

  std::vector<Point2> collinear = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  CHECK_THROWS_AS(convex_hull(collinear), DegenerateInput);
}

TEST_CASE("convex hull contains every input point") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point2> pts;
  for (int i = 0; i < 100; ++i) {
    const double r = 50.0 * std::sqrt(unit(rng));
    const double a = 2.0 * M_PI * unit(rng);
    pts.push_back({r * std::cos(a), r * std::sin(a)});
  }
  const ConvexPolygon hull = convex_hull(pts);
  CHECK(hull.area() <= M_PI * 50.0 * 50.0);
  for (const Point2& p : pts) {
    CHECK(hull.signed_interior_distance(p) >= -1e-9);
  }
}

TEST_CASE("clip: full containment, half overlap, disjoint") {
  const OrientedRect rect{{0, 0}, {1, 0}, 42.5, 22.0};  // 85 x 44

  const ConvexPolygon inside = square(40.0, {-20, -20});
  auto full = clip_polygon_to_rect(inside, rect);
  REQUIRE(full.has_value());
  CHECK(full->area() == doctest::Approx(1600.0));

  // Square straddling the right rect edge halfway.
  const ConvexPolygon straddle = square(20.0, {32.5, -10.0});
  auto half = clip_polygon_to_rect(straddle, rect);
  REQUIRE(half.has_value());
  CHECK(half->area() == doctest::Approx(200.0));
  const auto rect_loop = rect.corners();
  const std::vector<Point2> rect_verts(rect_loop.begin(), rect_loop.end());
  const double mc =
      oracle::mc_area(straddle.vertices(), &rect_verts, 1000000, 7);
  CHECK(half->area() == doctest::Approx(mc).epsilon(0.005));

  const ConvexPolygon far = square(10.0, {200, 200});
  CHECK(!clip_polygon_to_rect(far, rect).has_value());
}

TEST_CASE("clip monotonicity and idempotence over random polygons") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    const ConvexPolygon poly =
        oracle::random_convex_polygon(rng).translated(
            {40.0 * (unit(rng) - 0.5), 40.0 * (unit(rng) - 0.5)});
    const double a = 2.0 * M_PI * unit(rng);
    const OrientedRect rect{{0, 0}, {std::cos(a), std::sin(a)}, 30.0, 15.0};
    auto clipped = clip_polygon_to_rect(poly, rect);
    if (!clipped) continue;
    CHECK(clipped->area() <= poly.area() + 1e-9);
    CHECK(clipped->area() <= 4.0 * 30.0 * 15.0 + 1e-9);
    auto again = clip_polygon_to_rect(*clipped, rect);
    REQUIRE(again.has_value());
    REQUIRE(again->size() == clipped->size());
    // Same vertex loop up to rotation of the starting index.
    double best = 1e300;
    const std::size_t n = clipped->size();
    for (std::size_t off = 0; off < n; ++off) {
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, distance(again->vertex((i + off) % n),
                                         clipped->vertex(i)));
      }
      best = std::min(best, worst);
    }
    CHECK(best <= 1e-9);
  }
}

TEST_CASE("polygon area matches shoelace and Monte-Carlo") {
  CHECK(square(10.0).area() == doctest::Approx(100.0));
  const ConvexPolygon tri =
      ConvexPolygon::from_points({{0, 0}, {30, 0}, {0, 40}});
  CHECK(tri.area() == doctest::Approx(600.0));

  std::mt19937_64 rng(11);
  ConvexPolygon hept = oracle::random_convex_polygon(rng, 20.0, 40.0, 7);
  const double mc = oracle::mc_area(hept.vertices(), nullptr, 1000000, 13);
  CHECK(hept.area() == doctest::Approx(mc).epsilon(0.005));
}

TEST_CASE("min_distance basics and brute-force agreement") {
  const ConvexPolygon a = square(10.0, {0, 0});
  const ConvexPolygon b = square(10.0, {15, 0});
  CHECK(min_distance(a, b) == doctest::Approx(5.0));
  CHECK(min_distance(a, b) == min_distance(b, a));

  const ConvexPolygon c = square(10.0, {5, 5});
  CHECK(min_distance(a, c) == 0.0);

  const Segment seg{{20, 20}, {30, 12}};
  const double got = min_distance(a, seg);
  // Dense point/segment enumeration over the square boundary.
  double want = 1e300;
  const auto& verts = a.vertices();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Point2 p = verts[i], q = verts[(i + 1) % verts.size()];
    for (int k = 0; k <= 5000; ++k) {
      const double t = k / 5000.0;
      want = std::min(want, oracle::point_seg_dist(
                                {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)},
                                seg.a, seg.b));
    }
  }
  CHECK(got == doctest::Approx(want).epsilon(1e-9));
  // Exact corner-to-endpoint distance.
  CHECK(got ==
        doctest::Approx(std::hypot(20.0 - 10.0, 20.0 - 10.0)).epsilon(1e-9));
}

TEST_CASE("min_distance symmetry on random polygon pairs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int it = 0; it < 30; ++it) {
    const ConvexPolygon a = oracle::random_convex_polygon(rng).translated(
        {100.0 * unit(rng), 100.0 * unit(rng)});
    const ConvexPolygon b = oracle::random_convex_polygon(rng).translated(
        {100.0 * unit(rng), 100.0 * unit(rng)});
    CHECK(min_distance(a, b) == min_distance(b, a));
  }
}

TEST_CASE("uniform cover: 5x5 grid on a 100mm square") {
  const ConvexPolygon sq = square(100.0);
  const auto pts = uniform_cover_points(sq, 25);
  CHECK(pts.size() == 25);
  for (const Point2& p : pts) {
    CHECK(sq.signed_interior_distance(p) > 0.0);
  }
}

TEST_CASE("uniform cover: sliver stays inside, random hulls bounded") {
  const ConvexPolygon sliver =
      ConvexPolygon::from_points({{0, 0}, {120, 0.4}, {120, 2.2}, {0, 1.5}});
  const auto pts = uniform_cover_points(sliver, 10);
  CHECK(pts.size() >= 10);
  for (const Point2& p : pts) {
    CHECK(sliver.signed_interior_distance(p) > 0.0);
  }

  std::mt19937_64 rng(9);
  for (int it = 0; it < 20; ++it) {
    const ConvexPolygon hull = oracle::random_convex_polygon(rng, 25.0, 50.0);
    const auto cover = uniform_cover_points(hull, 25);
    CHECK(cover.size() >= 25);
    CHECK(cover.size() <= 36);
    for (const Point2& p : cover) {
      CHECK(hull.signed_interior_distance(p) > 0.0);
    }
    // Spacing is one grid pitch: nearest neighbours equal up to the pitch.
    double min_nn = 1e300, max_nn = 0.0;
    for (std::size_t i = 0; i < cover.size(); ++i) {
      double nn = 1e300;
      for (std::size_t j = 0; j < cover.size(); ++j) {
        if (i != j) nn = std::min(nn, distance(cover[i], cover[j]));
      }
      min_nn = std::min(min_nn, nn);
      max_nn = std::max(max_nn, nn);
    }
    CHECK(max_nn <= std::sqrt(2.0) * min_nn + 1e-9);
  }
}

TEST_CASE("uniform cover rejects degenerate hulls") {
  const ConvexPolygon tiny =
      ConvexPolygon::from_points({{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}});
  CHECK_THROWS_AS(uniform_cover_points(tiny, 5), DegenerateInput);
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(
      ConvexPolygon::from_points({{0, 0}, {10, 0}}), DegenerateInput);
  // Clockwise ordering is rejected.
  CHECK_THROWS_AS(
      ConvexPolygon::from_points({{0, 0}, {0, 10}, {10, 10}, {10, 0}}),
      DegenerateInput);
  // Collinear triple is rejected.
  CHECK_THROWS_AS(
      ConvexPolygon::from_points({{0, 0}, {5, 0}, {10, 0}, {5, 10}}),
      DegenerateInput);
  CHECK_THROWS_AS(
      ConvexPolygon::from_points({{0, 0}, {10, 0}, {std::nan(""), 10}}),
      DegenerateInput);
}

TEST_CASE("pose and rect transforms") {
  const Pose2 p = Pose2::make(1.0, 2.0, 3.0 * M_PI);  // wraps to -pi
  CHECK(p.theta == doctest::Approx(-M_PI));

  const OrientedRect r{{0, 0}, {0, 1}, 10.0, 5.0};
  const auto c = r.corners();
  // CCW order with the axis pointing +y.
  CHECK(c[0].x == doctest::Approx(5.0));
  CHECK(c[0].y == doctest::Approx(-10.0));
  CHECK(detail::loop_area(c.data(), 4) == doctest::Approx(200.0));
}
