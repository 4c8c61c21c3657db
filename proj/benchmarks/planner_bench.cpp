#include <benchmark/benchmark.h>

#include "mograsp/declutter.hpp"
#include "mograsp/grasp.hpp"
#include "mograsp/mognet.hpp"
#include "mograsp/sim.hpp"

using namespace mograsp;

namespace {

struct PlannerFixture {
  Scene scene;
  ObjectGroup group;
  GripperSpec gripper;
  FrictionModel friction = FrictionModel::from_mu(0.5);
  NoiseModel noise;

  PlannerFixture() {
    SceneSpec spec;
    spec.seed = 11;
    spec.object_count = 12;
    spec.region_width = 250.0;
    spec.region_height = 250.0;
    spec.clustering = 0.8;
    scene = generate_scene(spec);
    const auto groups = rank_obj_groups(create_obj_groups(scene, gripper));
    group = groups.front();
    noise.n_mc = 30;
    noise.seed = 5;
  }
};

}  // namespace

static void BM_NecessaryCondsProba(benchmark::State& state) {
  PlannerFixture fx;
  const auto cands =
      gen_grasp_cands(fx.scene, fx.group, fx.gripper, 25, 12);
  if (cands.empty()) state.SkipWithError("no candidates");
  std::size_t i = 0;
  for (auto _ : state) {
    const GraspAction& a = cands[i++ % cands.size()];
    benchmark::DoNotOptimize(necessary_conds_proba(
        fx.scene, fx.group, a, fx.gripper, fx.friction, fx.noise, 5));
  }
}
BENCHMARK(BM_NecessaryCondsProba);

static void BM_PlanGroup(benchmark::State& state) {
  PlannerFixture fx;
  const Predictor heuristic = make_total_area_predictor(fx.gripper);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_grasp_detailed(fx.scene, fx.group,
                                                 fx.gripper, fx.friction,
                                                 fx.noise, heuristic, 25, 12,
                                                 5));
  }
}
BENCHMARK(BM_PlanGroup);

static void BM_SimulateGrasp(benchmark::State& state) {
  PlannerFixture fx;
  const GraspAction a{Pose2::make(fx.scene[fx.group.members[0]].centroid().x,
                                  fx.scene[fx.group.members[0]].centroid().y,
                                  0.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_grasp(fx.scene, a, fx.gripper,
                                            fx.friction, NoiseModel::zero()));
  }
}
BENCHMARK(BM_SimulateGrasp);
