#include "mograsp/declutter.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "mograsp/errors.hpp"
#include "mograsp/random.hpp"

namespace mograsp {

std::vector<ObjectGroup> create_obj_groups(const Scene& scene,
                                           const GripperSpec& spec,
                                           int max_group_size) {
  const double radius = 0.5 * spec.max_width;
  std::set<std::vector<int>> seen;
  std::vector<ObjectGroup> groups;

  std::vector<Point2> centroids;
  centroids.reserve(scene.size());
  for (const ConvexPolygon& poly : scene) centroids.push_back(poly.centroid());

  for (std::size_t i = 0; i < scene.size(); ++i) {
    std::vector<std::pair<double, int>> near;  // (distance, index)
    for (std::size_t j = 0; j < scene.size(); ++j) {
      const double d = distance(centroids[i], centroids[j]);
      if (d <= radius) near.push_back({d, static_cast<int>(j)});
    }
    std::sort(near.begin(), near.end());
    if (static_cast<int>(near.size()) > max_group_size) {
      near.resize(static_cast<std::size_t>(max_group_size));
    }
    std::vector<int> members;
    for (const auto& [d, j] : near) members.push_back(j);
    std::sort(members.begin(), members.end());
    if (seen.insert(members).second) {
      groups.push_back(ObjectGroup{members});
    }
    // Singleton group for every object.
    const std::vector<int> single{static_cast<int>(i)};
    if (seen.insert(single).second) {
      groups.push_back(ObjectGroup{single});
    }
  }
  return groups;
}

std::vector<ObjectGroup> rank_obj_groups(std::vector<ObjectGroup> groups) {
  if (groups.empty()) throw DegenerateInput("no object groups to rank");
  std::stable_sort(groups.begin(), groups.end(),
                   [](const ObjectGroup& a, const ObjectGroup& b) {
                     if (a.size() != b.size()) return a.size() > b.size();
                     return a.members.front() < b.members.front();
                   });
  return groups;
}

namespace {

// Deterministic stand-in for wall-clock planning time so that benchmark
// outputs are byte-identical across runs and jobs settings.
double modeled_planning_time(std::size_t candidates, int n_mc,
                             const DeclutterConfig& config) {
  return static_cast<double>(candidates) *
         (n_mc * config.plan_cond_eval_cost_s + config.plan_predict_cost_s);
}

}  // namespace

EpisodeLog run_declutter(const Scene& initial_scene, const MethodSpec& method,
                         const DeclutterConfig& config) {
  EpisodeLog log;
  log.method = method.name;
  log.scene_seed = config.seed;
  log.initial_objects = static_cast<int>(initial_scene.size());

  const FrictionModel plan_friction = FrictionModel::from_mu(method.plan_mu);
  const FrictionModel sim_friction = FrictionModel::from_mu(method.sim_mu);

  // Active objects keep their original identity for the log.
  Scene scene = initial_scene;
  std::vector<int> identity(scene.size());
  std::iota(identity.begin(), identity.end(), 0);

  const int budget =
      config.attempt_budget_factor * static_cast<int>(initial_scene.size());
  int step = 0;
  while (!scene.empty() && step < budget) {
    std::vector<ObjectGroup> groups = create_obj_groups(scene, config.gripper);
    if (method.singletons_only) {
      std::vector<ObjectGroup> singles;
      for (const ObjectGroup& g : groups) {
        if (g.size() == 1) singles.push_back(g);
      }
      groups = singles;
    }
    groups = rank_obj_groups(std::move(groups));

    bool executed = false;
    for (const ObjectGroup& group : groups) {
      NoiseModel plan_noise = config.noise;
      plan_noise.seed = derive_seed(config.seed, 0x706C616EULL,
                                    static_cast<std::uint64_t>(step));
      const PlanResult plan = plan_grasp_detailed(
          scene, group, config.gripper, plan_friction, plan_noise,
          method.predictor, config.n_p, config.n_theta, config.n_s,
          config.jobs);
      if (plan.best_index < 0) continue;
      const CandidateEval& best =
          plan.evals[static_cast<std::size_t>(plan.best_index)];

      NoiseModel exec_noise = config.noise;
      exec_noise.seed = derive_seed(config.seed, 0x65786563ULL,
                                    static_cast<std::uint64_t>(step));
      const SimOutcome outcome = simulate_grasp(
          scene, best.action, config.gripper, sim_friction, exec_noise,
          config.sim);

      AttemptRecord rec;
      rec.step = step;
      for (int m : group.members) {
        rec.group.push_back(identity[static_cast<std::size_t>(m)]);
      }
      rec.action = best.action;
      rec.gamma = best.gamma;
      rec.n_g_pred = best.n_g_pred;
      rec.score = best.score;
      rec.n_g = outcome.n_g;
      rec.final_width = outcome.final_width;
      for (int r : outcome.retained) {
        rec.retained.push_back(identity[static_cast<std::size_t>(r)]);
      }
      rec.planning_time_s =
          modeled_planning_time(plan.evals.size(), config.noise.n_mc, config);
      log.attempts.push_back(rec);

      // Remove retained objects, keep the displaced poses of the rest.
      Scene next;
      std::vector<int> next_identity;
      for (std::size_t i = 0; i < scene.size(); ++i) {
        if (std::find(outcome.retained.begin(), outcome.retained.end(),
                      static_cast<int>(i)) != outcome.retained.end()) {
          continue;
        }
        next.push_back(outcome.post_scene[i]);
        next_identity.push_back(identity[i]);
      }
      scene = std::move(next);
      identity = std::move(next_identity);
      executed = true;
      ++step;
      break;
    }
    if (!executed) break;  // fully blocked scene; episode ends
  }
  log.remaining_objects = static_cast<int>(scene.size());
  return log;
}

Metrics compute_metrics(const EpisodeLog& log, double motion_time_s) {
  Metrics m;
  m.pick_attempts = static_cast<int>(log.attempts.size());
  if (log.attempts.empty()) {
    m.cleared = log.initial_objects == 0 ? 100.0 : 0.0;
    return m;
  }
  int successes = 0;
  int removed = 0;
  double plan_total = 0.0;
  for (const AttemptRecord& rec : log.attempts) {
    if (rec.n_g >= 1) ++successes;
    removed += rec.n_g;
    plan_total += rec.planning_time_s;
  }
  m.success_rate = 100.0 * successes / m.pick_attempts;
  m.grasped_objs = static_cast<double>(removed) / m.pick_attempts;
  m.planning_time = plan_total / m.pick_attempts;
  m.cleared = log.initial_objects > 0
                  ? 100.0 * removed / log.initial_objects
                  : 100.0;
  const double total_time = plan_total + motion_time_s * m.pick_attempts;
  m.pph = total_time > 0.0 ? removed * 3600.0 / total_time : 0.0;
  return m;
}

}  // namespace mograsp
