#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mograsp/grasp.hpp"
#include "mograsp/sim.hpp"

namespace mograsp {

/// Neighbourhood groups: for every object, the objects whose centroids
/// lie within max_width/2 of its centroid (capped at the 4 nearest),
/// plus all singletons; duplicate member sets removed.
std::vector<ObjectGroup> create_obj_groups(const Scene& scene,
                                           const GripperSpec& spec,
                                           int max_group_size = 4);

/// Descending by size; ties broken by the smaller minimum member index.
std::vector<ObjectGroup> rank_obj_groups(std::vector<ObjectGroup> groups);

struct AttemptRecord {
  int step = 0;
  std::vector<int> group;  // scene indices at attempt time
  GraspAction action;
  double gamma = 0.0;
  double n_g_pred = 0.0;
  double score = 0.0;
  int n_g = 0;
  double final_width = 0.0;
  std::vector<int> retained;
  double planning_time_s = 0.0;  // modeled, deterministic
};

struct EpisodeLog {
  std::string method;
  std::uint64_t scene_seed = 0;
  int initial_objects = 0;
  int remaining_objects = 0;
  std::vector<AttemptRecord> attempts;
};

struct Metrics {
  double success_rate = 0.0;   // % of attempts with n_g >= 1
  double pph = 0.0;            // picks per hour under the motion-time model
  double grasped_objs = 0.0;   // mean objects per attempt
  double planning_time = 0.0;  // mean seconds per attempt (modeled)
  double cleared = 0.0;        // % of objects removed
  int pick_attempts = 0;
};

struct MethodSpec {
  std::string name;
  Predictor predictor;            // grasp-count or heuristic prediction
  double plan_mu = 0.5;           // friction used by the planner/conditions
  double sim_mu = 0.5;            // friction of the simulated objects
  bool singletons_only = false;   // single-object-grasp baseline
};

struct DeclutterConfig {
  GripperSpec gripper;
  NoiseModel noise;                 // gamma sampling and execution noise
  SimParams sim;
  int n_p = 25;
  int n_theta = 12;
  int n_s = 5;
  int attempt_budget_factor = 3;    // budget = factor * object count
  double motion_time_s = 8.0;       // fixed transport time per attempt
  double plan_cond_eval_cost_s = 4e-6;   // modeled cost per condition check
  double plan_predict_cost_s = 2e-4;     // modeled cost per prediction
  int jobs = 1;
  std::uint64_t seed = 0;           // stream root for noise draws
};

/// Runs the decluttering loop on a scene copy until it is empty or the
/// attempt budget is reached. Bitwise reproducible for fixed seeds.
EpisodeLog run_declutter(const Scene& scene, const MethodSpec& method,
                         const DeclutterConfig& config);

Metrics compute_metrics(const EpisodeLog& log, double motion_time_s = 8.0);

}  // namespace mograsp
