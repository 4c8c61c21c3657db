#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "mograsp/config.hpp"
#include "mograsp/declutter.hpp"
#include "mograsp/errors.hpp"
#include "mograsp/io.hpp"
#include "mograsp/mognet.hpp"
#include "mograsp/parallel.hpp"
#include "mograsp/random.hpp"

namespace {

using namespace mograsp;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "key = value config file");
  cmd->add_option("--seed", opts->seed, "root random seed");
  cmd->add_option("--jobs", opts->jobs, "worker threads");
}

Config resolve_config(const CommonOpts& opts) {
  Config cfg =
      opts.config_path.empty() ? Config{} : Config::load(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.jobs) cfg.jobs = *opts.jobs;
  cfg.validate();
  return cfg;
}

void write_sidecar_meta(const std::string& out_path, const Config& cfg,
                        const std::string& kind) {
  json j;
  j["schema"] = "mograsp-meta/1";
  j["artifact"] = kind;
  json c = json::object();
  for (const auto& [k, v] : cfg.as_map()) c[k] = v;
  j["config"] = c;
  atomic_write(out_path + ".meta.json", j.dump(2) + "\n");
}

Predictor constant_predictor(double value) {
  return [value](const Scene&, const ObjectGroup&, const GraspAction&) {
    return value;
  };
}

MethodSpec resolve_method(const std::string& name, const Config& cfg,
                          const MogNetEnsemble* model,
                          const MogNetEnsemble* rand_model) {
  MethodSpec spec;
  spec.name = name;
  spec.plan_mu = cfg.mu_frictional;
  spec.sim_mu = cfg.mu_frictional;
  if (name == "mognet") {
    if (!model) throw ConfigError("method 'mognet' needs --model");
    spec.predictor = make_mognet_predictor(*model);
  } else if (name == "rand_net") {
    const MogNetEnsemble* m = rand_model ? rand_model : model;
    if (!m) throw ConfigError("method 'rand_net' needs --rand-model");
    spec.predictor = make_mognet_predictor(*m);
  } else if (name == "frictional_sog") {
    spec.singletons_only = true;
    spec.predictor = constant_predictor(1.0);
  } else if (name == "frictionless_mognet") {
    if (!model) throw ConfigError("method 'frictionless_mognet' needs --model");
    spec.predictor = make_mognet_predictor(*model);
    spec.plan_mu = cfg.mu_frictionless;
    spec.sim_mu = cfg.mu_frictionless;
  } else if (name == "heuristic_at") {
    spec.predictor = make_total_area_predictor(cfg.gripper());
  } else {
    throw ConfigError("unknown method: " + name);
  }
  return spec;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

int cmd_gen_scenes(const CommonOpts& common, const std::string& out_dir,
                   int num_scenes) {
  const Config cfg = resolve_config(common);
  std::filesystem::create_directories(out_dir);
  for (int i = 0; i < num_scenes; ++i) {
    SceneSpec spec = cfg.scene_spec();
    spec.seed = cfg.seed + static_cast<std::uint64_t>(i);
    SceneFile file;
    file.seed = spec.seed;
    file.objects = generate_scene(spec);
    file.config = cfg.as_map();
    const std::string path =
        out_dir + "/scene_" + std::to_string(spec.seed) + ".json";
    save_scene(path, file);
    std::cout << path << "\n";
  }
  return 0;
}

int cmd_collect(const CommonOpts& common, const std::string& mode_name,
                const std::string& out_path, int episodes) {
  const Config cfg = resolve_config(common);
  CollectMode mode;
  if (mode_name == "necessary_conditions") {
    mode = CollectMode::necessary_conditions;
  } else if (mode_name == "random") {
    mode = CollectMode::random;
  } else {
    throw ConfigError("--mode must be necessary_conditions or random");
  }
  const Dataset dataset =
      collect_dataset(cfg.scene_spec(), episodes, cfg.friction(), mode,
                      cfg.collect_params());
  save_dataset(out_path, dataset);
  write_sidecar_meta(out_path, cfg, "dataset");
  std::cout << "samples: " << dataset.size() << "\n";
  int histogram[kMaxGraspCount + 1] = {0};
  for (const Sample& s : dataset) histogram[s.label]++;
  std::cout << "labels:";
  for (int c = 0; c <= kMaxGraspCount; ++c) std::cout << " " << histogram[c];
  std::cout << "\n";
  return 0;
}

int cmd_train(const CommonOpts& common, const std::string& data_path,
              const std::string& out_path) {
  const Config cfg = resolve_config(common);
  const Dataset dataset = load_dataset(data_path);
  MlpHyper hyper = cfg.mlp_hyper();
  std::vector<TrainReport> reports;
  const MogNetEnsemble ensemble =
      train_ensemble(dataset, hyper, cfg.jobs, &reports);

  ModelFile file;
  file.ensemble = ensemble;
  file.config = cfg.as_map();
  file.reports = reports;
  save_model(out_path, file);

  for (std::size_t c = 0; c < reports.size(); ++c) {
    if (!ensemble.models[c].trainable) {
      std::printf("class %zu: untrainable (prior %.4f)\n", c,
                  ensemble.models[c].prior);
    } else {
      std::printf("class %zu: held-out accuracy %.4f (%d epochs)\n", c,
                  reports[c].validation_accuracy, reports[c].epochs_run);
    }
  }
  return 0;
}

int cmd_check_grasp(const CommonOpts& common, const std::string& scene_path,
                    double x, double y, double theta,
                    const std::string& group_csv,
                    std::optional<double> mu_override) {
  const Config cfg = resolve_config(common);
  const SceneFile scene_file = load_scene(scene_path);
  const Scene& scene = scene_file.objects;
  const GripperSpec gripper = cfg.gripper();
  const double mu = mu_override ? *mu_override : cfg.mu_frictional;
  const FrictionModel friction = FrictionModel::from_mu(mu);
  const GraspAction action{Pose2::make(x, y, theta)};

  ObjectGroup group;
  if (!group_csv.empty()) {
    for (const std::string& tok : split_list(group_csv)) {
      group.members.push_back(std::stoi(tok));
    }
  } else {
    // Default: all objects intersecting the interior region.
    const OrientedRect rect = gripper_interior(action, gripper, gripper.max_width);
    for (std::size_t i = 0; i < scene.size(); ++i) {
      auto clip = clip_polygon_to_rect(scene[i], rect);
      if (clip && clip->area() > 1e-9) {
        group.members.push_back(static_cast<int>(i));
      }
    }
  }
  if (group.members.empty()) {
    throw DegenerateInput("no objects under the gripper; pass --group");
  }

  const OrientedRect rect = gripper_interior(action, gripper, gripper.max_width);
  json report;
  report["schema"] = "mograsp-check/1";
  report["action"] = json{{"x", x}, {"y", y}, {"theta", action.pose.theta}};
  report["mu"] = mu;
  report["group"] = group.members;

  double h_star = 0.0;
  json per_object = json::array();
  const Vec2 u = rect.axis;
  double first_centroid = 1e300, last_centroid = -1e300;
  double first_lo = 0.0, last_hi = 0.0;
  for (int idx : group.members) {
    const ConvexPolygon& poly = scene.at(static_cast<std::size_t>(idx));
    const double d_star = min_stable_diameter(poly, friction, cfg.n_s);
    h_star += d_star;
    auto clip = clip_polygon_to_rect(poly, rect);
    const double area = clip ? clip->area() : 0.0;
    per_object.push_back(json{{"index", idx},
                              {"intersection_area", area},
                              {"min_stable_diameter", d_star}});
    if (clip) {
      double lo, hi;
      detail::loop_extent(clip->vertices().data(),
                          static_cast<int>(clip->size()), u, lo, hi);
      const double cproj = dot(u, clip->centroid());
      if (cproj < first_centroid) {
        first_centroid = cproj;
        first_lo = lo;
      }
      if (cproj > last_centroid) {
        last_centroid = cproj;
        last_hi = hi;
      }
    }
  }
  const double center_proj = dot(u, rect.center);
  const double b_l = std::max(0.0, first_lo - (center_proj - rect.half_width));
  const double b_r = std::max(0.0, (center_proj + rect.half_width) - last_hi);
  const double h0 =
      first_centroid > last_centroid ? 0.0
                                     : gripper.max_width - (b_l + b_r);

  const bool admissible =
      check_necessary_conditions(scene, group, action, gripper, friction,
                                 cfg.n_s);
  NoiseModel noise = cfg.noise();
  const double gamma = necessary_conds_proba(scene, group, action, gripper,
                                             friction, noise, cfg.n_s);

  report["per_object"] = per_object;
  report["h0"] = h0;
  report["h_star_f"] = h_star;
  report["gamma"] = gamma;
  report["admissible"] = admissible;
  report["verdict"] = admissible ? "admissible" : "inadmissible";
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_declutter(const CommonOpts& common, const std::string& scene_path,
                  const std::string& method_name,
                  const std::string& model_path,
                  const std::string& rand_model_path,
                  const std::string& out_path) {
  const Config cfg = resolve_config(common);
  const SceneFile scene_file = load_scene(scene_path);

  std::optional<MogNetEnsemble> model, rand_model;
  if (!model_path.empty()) model = load_model(model_path).ensemble;
  if (!rand_model_path.empty()) rand_model = load_model(rand_model_path).ensemble;

  const MethodSpec method =
      resolve_method(method_name, cfg, model ? &*model : nullptr,
                     rand_model ? &*rand_model : nullptr);
  DeclutterConfig dcfg = cfg.declutter_config();
  dcfg.seed = derive_seed(cfg.seed, scene_file.seed);
  const EpisodeLog log = run_declutter(scene_file.objects, method, dcfg);
  save_episode_log(out_path, log, cfg.as_map());

  const Metrics m = compute_metrics(log, cfg.motion_time);
  std::printf(
      "method %s: attempts %d, success %.1f%%, grasped/attempt %.3f, "
      "cleared %.1f%%, pph %.1f\n",
      method_name.c_str(), m.pick_attempts, m.success_rate, m.grasped_objs,
      m.cleared, m.pph);
  return 0;
}

int cmd_bench(const CommonOpts& common, const std::string& methods_csv,
              int num_seeds, const std::string& model_path,
              const std::string& rand_model_path, const std::string& out_path,
              const std::string& episodes_dir) {
  const Config cfg = resolve_config(common);
  const std::vector<std::string> methods = split_list(methods_csv);
  if (methods.empty()) throw ConfigError("--methods must name at least one");

  std::optional<MogNetEnsemble> model, rand_model;
  if (!model_path.empty()) model = load_model(model_path).ensemble;
  if (!rand_model_path.empty()) rand_model = load_model(rand_model_path).ensemble;

  std::vector<MethodSpec> specs;
  for (const std::string& name : methods) {
    specs.push_back(resolve_method(name, cfg, model ? &*model : nullptr,
                                   rand_model ? &*rand_model : nullptr));
  }

  struct Job {
    std::size_t method_index;
    std::uint64_t scene_seed;
  };
  std::vector<Job> jobs_list;
  for (std::size_t m = 0; m < specs.size(); ++m) {
    for (int s = 0; s < num_seeds; ++s) {
      jobs_list.push_back(Job{m, cfg.seed + static_cast<std::uint64_t>(s)});
    }
  }

  std::vector<BenchRow> rows(jobs_list.size());
  std::vector<EpisodeLog> logs(jobs_list.size());
  parallel_for_indexed(jobs_list.size(), cfg.jobs, [&](std::size_t i) {
    const Job& job = jobs_list[i];
    SceneSpec sspec = cfg.scene_spec();
    sspec.seed = job.scene_seed;
    const Scene scene = generate_scene(sspec);
    DeclutterConfig dcfg = cfg.declutter_config();
    dcfg.jobs = 1;  // parallelism lives at the (method, seed) level
    dcfg.seed = derive_seed(cfg.seed, job.scene_seed);
    const EpisodeLog log =
        run_declutter(scene, specs[job.method_index], dcfg);
    rows[i] = BenchRow{specs[job.method_index].name, job.scene_seed,
                       compute_metrics(log, cfg.motion_time)};
    logs[i] = log;
  });

  atomic_write(out_path, metrics_csv(rows, cfg.as_map()));
  if (!episodes_dir.empty()) {
    std::filesystem::create_directories(episodes_dir);
    for (std::size_t i = 0; i < jobs_list.size(); ++i) {
      const std::string path = episodes_dir + "/" + rows[i].method + "_" +
                               std::to_string(rows[i].seed) + ".jsonl";
      save_episode_log(path, logs[i], cfg.as_map());
    }
  }
  std::cout << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar multi-object grasp planning toolkit"};
  app.require_subcommand(1);

  CommonOpts gen_common, collect_common, train_common, check_common,
      declutter_common, bench_common;

  auto* gen = app.add_subcommand("gen-scenes", "generate scene JSON files");
  std::string gen_out = "scenes";
  int gen_num = 1;
  add_common(gen, &gen_common);
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--num-scenes", gen_num, "number of scenes");

  auto* collect = app.add_subcommand("collect-data",
                                     "self-supervised dataset collection");
  std::string collect_mode = "necessary_conditions";
  std::string collect_out = "dataset.jsonl";
  int collect_episodes = 200;
  add_common(collect, &collect_common);
  collect->add_option("--mode", collect_mode,
                      "necessary_conditions or random");
  collect->add_option("--out", collect_out, "output JSONL path");
  collect->add_option("--episodes", collect_episodes, "max scene episodes");

  auto* train = app.add_subcommand("train", "train the classifier ensemble");
  std::string train_data, train_out = "model.json";
  add_common(train, &train_common);
  train->add_option("--data", train_data, "dataset JSONL")->required();
  train->add_option("--out", train_out, "output model path");

  auto* check = app.add_subcommand("check-grasp",
                                   "necessary-condition report for a pose");
  std::string check_scene, check_group;
  double check_x = 0.0, check_y = 0.0, check_theta = 0.0;
  std::optional<double> check_mu;
  add_common(check, &check_common);
  check->add_option("--scene", check_scene, "scene JSON")->required();
  check->add_option("--x", check_x, "grasp x (mm)")->required();
  check->add_option("--y", check_y, "grasp y (mm)")->required();
  check->add_option("--theta", check_theta, "grasp angle (rad)")->required();
  check->add_option("--group", check_group, "comma-separated object indices");
  check->add_option("--mu", check_mu, "friction coefficient override");

  auto* declutter = app.add_subcommand("declutter", "run one episode");
  std::string dec_scene, dec_method = "mognet", dec_model, dec_rand_model;
  std::string dec_out = "episode.jsonl";
  add_common(declutter, &declutter_common);
  declutter->add_option("--scene", dec_scene, "scene JSON")->required();
  declutter->add_option("--method", dec_method,
                        "mognet|rand_net|frictional_sog|frictionless_mognet|"
                        "heuristic_at");
  declutter->add_option("--model", dec_model, "trained model JSON");
  declutter->add_option("--rand-model", dec_rand_model,
                        "model for the rand_net baseline");
  declutter->add_option("--out", dec_out, "episode log JSONL");

  auto* bench = app.add_subcommand("bench", "metrics over seeds x methods");
  std::string bench_methods = "mognet,frictional_sog";
  std::string bench_model, bench_rand_model, bench_out = "bench.csv";
  std::string bench_episodes_dir;
  int bench_num_seeds = 10;
  add_common(bench, &bench_common);
  bench->add_option("--methods", bench_methods, "comma-separated methods");
  bench->add_option("--num-seeds", bench_num_seeds, "scene seeds to run");
  bench->add_option("--model", bench_model, "trained model JSON");
  bench->add_option("--rand-model", bench_rand_model,
                    "model for the rand_net baseline");
  bench->add_option("--out", bench_out, "metrics CSV path");
  bench->add_option("--episodes-dir", bench_episodes_dir,
                    "directory for per-episode JSONL logs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_scenes(gen_common, gen_out, gen_num);
    if (collect->parsed()) {
      return cmd_collect(collect_common, collect_mode, collect_out,
                         collect_episodes);
    }
    if (train->parsed()) return cmd_train(train_common, train_data, train_out);
    if (check->parsed()) {
      return cmd_check_grasp(check_common, check_scene, check_x, check_y,
                             check_theta, check_group, check_mu);
    }
    if (declutter->parsed()) {
      return cmd_declutter(declutter_common, dec_scene, dec_method, dec_model,
                           dec_rand_model, dec_out);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_common, bench_methods, bench_num_seeds,
                       bench_model, bench_rand_model, bench_out,
                       bench_episodes_dir);
    }
  } catch (const mograsp::Error& e) {
    nlohmann::json err;
    err["error"] = {{"type", "mograsp"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = {{"type", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  }
  return 1;
}
