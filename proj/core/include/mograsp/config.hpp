#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mograsp/declutter.hpp"
#include "mograsp/grasp.hpp"
#include "mograsp/mognet.hpp"
#include "mograsp/sim.hpp"

namespace mograsp {

/// Flat key=value configuration; defaults reproduce the published
/// operating point (N_p=25, N_theta=12, N_s=5, sigma_u=[2mm,2mm,2deg],
/// sigma_x=2mm, mu=0.5/0.01, N_v=8, N_g_max=4) so a bare run uses it.
struct Config {
  // gripper
  double max_width = 85.0;
  double jaw_length = 44.0;
  double jaw_thickness = 6.0;
  double max_force = 235.0;
  // friction
  double mu_frictional = 0.5;
  double mu_frictionless = 0.01;
  // sampling
  int n_p = 25;
  int n_theta = 12;
  int n_s = 5;
  int n_mc = 30;
  // noise
  double sigma_u_xy = 2.0;
  double sigma_u_theta_deg = 2.0;
  double sigma_x = 2.0;
  // network
  std::string hidden = "500,300,150,50";
  double learning_rate = 1e-3;
  double l2_penalty = 1e-4;
  int batch_size = 200;
  int max_epochs = 200;
  int patience = 10;
  double validation_fraction = 0.2;
  // sim
  double tau_contain = 0.35;
  double colinearity_tol = 0.1;
  int support_ns = 25;
  double settle_band = 4.0;
  double motion_time = 8.0;
  // declutter / collection
  int attempt_budget_factor = 3;
  int min_group_size = 2;
  int target_samples = 1545;
  // scene generation
  int object_count = 75;
  int min_vertices = 3;
  int max_vertices = 8;
  double min_size = 25.0;
  double max_size = 55.0;
  double region_width = 600.0;
  double region_height = 600.0;
  double clustering = 0.7;
  double margin = 1.0;
  // run control
  std::uint64_t seed = 0;
  int jobs = 1;

  static Config load(const std::string& path);
  void apply_line(const std::string& key, const std::string& value);
  void validate() const;
  std::map<std::string, std::string> as_map() const;

  GripperSpec gripper() const;
  NoiseModel noise() const;
  SimParams sim_params() const;
  SceneSpec scene_spec() const;
  MlpHyper mlp_hyper() const;
  DeclutterConfig declutter_config() const;
  CollectParams collect_params() const;
  FrictionModel friction(bool frictional = true) const;
};

}  // namespace mograsp
