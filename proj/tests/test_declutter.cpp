#include <doctest.h>

#include <cmath>
#include <set>

#include "mograsp/declutter.hpp"
#include "mograsp/errors.hpp"
#include "mograsp/mognet.hpp"
#include "oracles.hpp"

using namespace mograsp;

namespace {

ConvexPolygon square_at(double side, double x0, double y0) {
  return ConvexPolygon::from_points(
      {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

MethodSpec sog_method() {
  MethodSpec m;
  m.name = "frictional_sog";
  m.singletons_only = true;
  m.predictor = [](const Scene&, const ObjectGroup&, const GraspAction&) {
    return 1.0;
  };
  return m;
}

MethodSpec heuristic_method(const GripperSpec& spec) {
  MethodSpec m;
  m.name = "heuristic_at";
  m.predictor = make_total_area_predictor(spec);
  return m;
}

}  // namespace

TEST_CASE("object groups: pairs within half a gripper width") {
  const GripperSpec spec;  // max_width 85 -> radius 42.5
  Scene scene;
  scene.push_back(square_at(20.0, 0.0, 0.0));
  scene.push_back(square_at(20.0, 30.0, 0.0));  // centroids 30mm apart
  auto groups = create_obj_groups(scene, spec);
  REQUIRE(groups.size() == 3);
  std::set<std::vector<int>> sets;
  for (const ObjectGroup& g : groups) sets.insert(g.members);
  CHECK(sets.count({0}) == 1);
  CHECK(sets.count({1}) == 1);
  CHECK(sets.count({0, 1}) == 1);

  Scene isolated;
  isolated.push_back(square_at(20.0, 0.0, 0.0));
  isolated.push_back(square_at(20.0, 200.0, 0.0));
  auto iso_groups = create_obj_groups(isolated, spec);
  REQUIRE(iso_groups.size() == 2);
  for (const ObjectGroup& g : iso_groups) CHECK(g.size() == 1);
}

TEST_CASE("object groups: six-object cluster capped at four members") {
  const GripperSpec spec;
  Scene scene;
  for (int i = 0; i < 6; ++i) {
    scene.push_back(square_at(12.0, 16.0 * i, 0.0));
  }
  const auto groups = create_obj_groups(scene, spec);
  for (const ObjectGroup& g : groups) {
    CHECK(g.size() <= 4);
    for (std::size_t k = 1; k < g.members.size(); ++k) {
      CHECK(g.members[k - 1] < g.members[k]);
    }
  }
  // Every object still has its singleton group.
  std::set<std::vector<int>> sets;
  for (const ObjectGroup& g : groups) sets.insert(g.members);
  for (int i = 0; i < 6; ++i) {
    CHECK(sets.count({i}) == 1);
  }
}

TEST_CASE("group ranking: size descending, min-index tiebreak") {
  std::vector<ObjectGroup> groups;
  groups.push_back(ObjectGroup{{4}});
  groups.push_back(ObjectGroup{{1, 2, 3}});
  groups.push_back(ObjectGroup{{0, 5}});
  auto ranked = rank_obj_groups(groups);
  CHECK(ranked[0].size() == 3);
  CHECK(ranked[1].size() == 2);
  CHECK(ranked[2].size() == 1);

  std::vector<ObjectGroup> ties;
  ties.push_back(ObjectGroup{{2, 3}});
  ties.push_back(ObjectGroup{{0, 4}});
  auto ranked_ties = rank_obj_groups(ties);
  CHECK(ranked_ties[0].members == std::vector<int>{0, 4});
  CHECK(ranked_ties[1].members == std::vector<int>{2, 3});

  CHECK_THROWS_AS(rank_obj_groups({}), DegenerateInput);
}

TEST_CASE("declutter: empty scene, single object, conservation") {
  DeclutterConfig config;
  config.noise.n_mc = 10;
  config.seed = 5;

  const EpisodeLog empty = run_declutter({}, sog_method(), config);
  CHECK(empty.attempts.empty());
  CHECK(compute_metrics(empty).cleared == 100.0);

  Scene one;
  one.push_back(square_at(40.0, -20.0, -20.0));
  for (const MethodSpec& method :
       {sog_method(), heuristic_method(config.gripper)}) {
    const EpisodeLog log = run_declutter(one, method, config);
    REQUIRE(log.attempts.size() == 1);
    CHECK(log.attempts[0].n_g == 1);
    const Metrics m = compute_metrics(log);
    CHECK(m.cleared == 100.0);
    CHECK(m.success_rate == 100.0);
  }

  // Conservation over a clustered scene.
  SceneSpec sspec;
  sspec.seed = 77;
  sspec.object_count = 10;
  sspec.region_width = 240.0;
  sspec.region_height = 240.0;
  sspec.clustering = 0.8;
  const Scene scene = generate_scene(sspec);
  const EpisodeLog log = run_declutter(scene, heuristic_method(config.gripper),
                                       config);
  int removed = 0;
  for (const AttemptRecord& rec : log.attempts) {
    removed += rec.n_g;
    CHECK(rec.gamma > 0.0);
    CHECK(rec.score > 0.0);
    CHECK(static_cast<int>(rec.retained.size()) == rec.n_g);
  }
  CHECK(removed + log.remaining_objects == log.initial_objects);
}

TEST_CASE("declutter: bitwise reproducible and sog stays single-object") {
  DeclutterConfig config;
  config.noise.n_mc = 10;
  config.seed = 11;
  SceneSpec sspec;
  sspec.seed = 88;
  sspec.object_count = 8;
  sspec.region_width = 220.0;
  sspec.region_height = 220.0;
  sspec.clustering = 0.8;
  const Scene scene = generate_scene(sspec);

  const EpisodeLog a = run_declutter(scene, sog_method(), config);
  const EpisodeLog b = run_declutter(scene, sog_method(), config);
  REQUIRE(a.attempts.size() == b.attempts.size());
  for (std::size_t i = 0; i < a.attempts.size(); ++i) {
    CHECK(a.attempts[i].action.pose.x == b.attempts[i].action.pose.x);
    CHECK(a.attempts[i].action.pose.y == b.attempts[i].action.pose.y);
    CHECK(a.attempts[i].action.pose.theta == b.attempts[i].action.pose.theta);
    CHECK(a.attempts[i].gamma == b.attempts[i].gamma);
    CHECK(a.attempts[i].n_g == b.attempts[i].n_g);
    CHECK(a.attempts[i].n_g <= 1);  // singleton groups only
    CHECK(a.attempts[i].group.size() == 1);
  }
}

TEST_CASE("metrics arithmetic") {
  EpisodeLog log;
  log.initial_objects = 20;
  for (int i = 0; i < 10; ++i) {
    AttemptRecord rec;
    rec.n_g = i == 0 ? 0 : 1;  // 9 of 10 succeed
    rec.planning_time_s = 0.1;
    log.attempts.push_back(rec);
  }
  log.remaining_objects = 11;
  const Metrics m = compute_metrics(log, 8.0);
  CHECK(m.success_rate == doctest::Approx(90.0));
  CHECK(m.pick_attempts == 10);
  CHECK(m.grasped_objs == doctest::Approx(0.9));
  CHECK(m.cleared == doctest::Approx(45.0));
  CHECK(m.planning_time == doctest::Approx(0.1));

  EpisodeLog twos;
  twos.initial_objects = 10;
  for (int i = 0; i < 5; ++i) {
    AttemptRecord rec;
    rec.n_g = 2;
    rec.planning_time_s = 0.2;
    twos.attempts.push_back(rec);
  }
  twos.remaining_objects = 0;
  CHECK(compute_metrics(twos).grasped_objs == doctest::Approx(2.0));

  const double pph8 = compute_metrics(twos, 8.0).pph;
  const double pph16 = compute_metrics(twos, 16.0).pph;
  CHECK(pph16 < pph8);
}
