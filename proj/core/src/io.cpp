#include "mograsp/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mograsp/errors.hpp"

namespace mograsp {

using nlohmann::json;

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty()
                           ? fs::path(".")
                           : target.parent_path();
  const fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json config_json(const std::map<std::string, std::string>& config) {
  json j = json::object();
  for (const auto& [k, v] : config) j[k] = v;
  return j;
}

std::map<std::string, std::string> config_from_json(const json& j) {
  std::map<std::string, std::string> m;
  if (!j.is_object()) return m;
  for (const auto& [k, v] : j.items()) m[k] = v.get<std::string>();
  return m;
}

void expect_schema(const json& j, const std::string& want,
                   const std::string& path) {
  if (!j.contains("schema") || j["schema"] != want) {
    throw SchemaError(path + ": expected schema '" + want + "'");
  }
}

}  // namespace

void save_scene(const std::string& path, const SceneFile& file) {
  json j;
  j["schema"] = kSceneSchema;
  j["seed"] = file.seed;
  json objs = json::array();
  for (const ConvexPolygon& poly : file.objects) {
    json verts = json::array();
    for (const Point2& p : poly.vertices()) {
      verts.push_back(json::array({p.x, p.y}));
    }
    objs.push_back(json{{"vertices", verts}});
  }
  j["objects"] = objs;
  if (!file.config.empty()) j["config"] = config_json(file.config);
  atomic_write(path, j.dump(2) + "\n");
}

SceneFile load_scene(const std::string& path) {
  json j;
  try {
    j = json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  expect_schema(j, kSceneSchema, path);
  SceneFile file;
  file.seed = j.value("seed", 0ULL);
  if (!j.contains("objects") || !j["objects"].is_array()) {
    throw SchemaError(path + ": missing objects array");
  }
  for (const json& obj : j["objects"]) {
    std::vector<Point2> verts;
    for (const json& v : obj.at("vertices")) {
      verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    }
    if (verts.size() > 8) {
      throw DegenerateInput(path + ": object exceeds 8 vertices");
    }
    ConvexPolygon poly = ConvexPolygon::from_points(std::move(verts));
    if (poly.area() < 1.0) {
      throw DegenerateInput(path + ": object area below 1 mm^2");
    }
    file.objects.push_back(std::move(poly));
  }
  if (j.contains("config")) file.config = config_from_json(j["config"]);
  return file;
}

void save_dataset(const std::string& path, const Dataset& dataset) {
  std::ostringstream os;
  for (const Sample& s : dataset) {
    json j;
    json feats = json::array();
    for (double v : s.features.values) feats.push_back(v);
    j["features"] = feats;
    j["label"] = s.label;
    j["seed"] = s.seed;
    j["step"] = s.step;
    os << j.dump() << "\n";
  }
  atomic_write(path, os.str());
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  Dataset dataset;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(path + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
    Sample s;
    const auto& feats = j.at("features");
    if (feats.size() != kFeatureDim) {
      throw SchemaError(path + ":" + std::to_string(line_no) +
                        ": features must have 65 entries");
    }
    for (int k = 0; k < kFeatureDim; ++k) {
      s.features.values[static_cast<std::size_t>(k)] =
          feats.at(k).get<double>();
    }
    s.label = j.at("label").get<int>();
    if (s.label < 0 || s.label > kMaxGraspCount) {
      throw SchemaError(path + ":" + std::to_string(line_no) +
                        ": label outside 0..4");
    }
    s.seed = j.at("seed").get<std::uint64_t>();
    s.step = j.at("step").get<int>();
    dataset.push_back(s);
  }
  return dataset;
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols =
      rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = j.at(r).at(c).get<double>();
    }
  }
  return m;
}

}  // namespace

void save_model(const std::string& path, const ModelFile& file) {
  json j;
  j["schema"] = kModelSchema;
  j["input_dim"] = kFeatureDim;
  json classes = json::array();
  for (std::size_t c = 0; c < file.ensemble.models.size(); ++c) {
    const MlpModel& m = file.ensemble.models[c];
    json cls;
    cls["class_id"] = c;
    cls["trainable"] = m.trainable;
    cls["prior"] = m.prior;
    cls["feature_scale"] = m.feature_scale;
    cls["activation"] = "relu";
    cls["output"] = "logistic";
    json layers = json::array();
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
      json layer;
      layer["weights"] = matrix_json(m.weights[l]);
      json bias = json::array();
      for (Eigen::Index i = 0; i < m.biases[l].size(); ++i) {
        bias.push_back(m.biases[l](i));
      }
      layer["bias"] = bias;
      layers.push_back(layer);
    }
    cls["layers"] = layers;
    classes.push_back(cls);
  }
  j["classes"] = classes;
  if (!file.config.empty()) j["config"] = config_json(file.config);
  if (!file.reports.empty()) {
    json reps = json::array();
    for (const TrainReport& r : file.reports) {
      reps.push_back(json{{"epochs", r.epochs_run},
                          {"best_validation_loss", r.best_validation_loss},
                          {"train_accuracy", r.train_accuracy},
                          {"validation_accuracy", r.validation_accuracy}});
    }
    j["reports"] = reps;
  }
  atomic_write(path, j.dump() + "\n");
}

ModelFile load_model(const std::string& path) {
  json j;
  try {
    j = json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  expect_schema(j, kModelSchema, path);
  if (j.value("input_dim", 0) != kFeatureDim) {
    throw SchemaError(path + ": unexpected input dimension");
  }
  ModelFile file;
  for (const json& cls : j.at("classes")) {
    MlpModel m;
    m.trainable = cls.at("trainable").get<bool>();
    m.prior = cls.at("prior").get<double>();
    m.feature_scale = cls.at("feature_scale").get<double>();
    for (const json& layer : cls.at("layers")) {
      m.weights.push_back(matrix_from_json(layer.at("weights")));
      const json& bias = layer.at("bias");
      Eigen::VectorXd b(static_cast<Eigen::Index>(bias.size()));
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        b(i) = bias.at(i).get<double>();
      }
      m.biases.push_back(std::move(b));
    }
    file.ensemble.models.push_back(std::move(m));
  }
  if (file.ensemble.models.size() != kMaxGraspCount + 1) {
    throw SchemaError(path + ": expected 5 class models");
  }
  if (j.contains("config")) file.config = config_from_json(j["config"]);
  if (j.contains("reports")) {
    for (const json& r : j["reports"]) {
      TrainReport rep;
      rep.epochs_run = r.value("epochs", 0);
      rep.best_validation_loss = r.value("best_validation_loss", 0.0);
      rep.train_accuracy = r.value("train_accuracy", 0.0);
      rep.validation_accuracy = r.value("validation_accuracy", 0.0);
      file.reports.push_back(rep);
    }
  }
  return file;
}

void save_episode_log(const std::string& path, const EpisodeLog& log,
                      const std::map<std::string, std::string>& config) {
  std::ostringstream os;
  json head;
  head["schema"] = kEpisodeSchema;
  head["method"] = log.method;
  head["scene_seed"] = log.scene_seed;
  head["initial_objects"] = log.initial_objects;
  head["remaining_objects"] = log.remaining_objects;
  if (!config.empty()) head["config"] = config_json(config);
  os << head.dump() << "\n";
  for (const AttemptRecord& rec : log.attempts) {
    json j;
    j["step"] = rec.step;
    j["group"] = rec.group;
    j["action"] = json{{"x", rec.action.pose.x},
                       {"y", rec.action.pose.y},
                       {"theta", rec.action.pose.theta}};
    j["gamma"] = rec.gamma;
    j["n_g_pred"] = rec.n_g_pred;
    j["score"] = rec.score;
    j["n_g"] = rec.n_g;
    j["final_width"] = rec.final_width;
    j["retained"] = rec.retained;
    j["planning_time"] = rec.planning_time_s;
    os << j.dump() << "\n";
  }
  atomic_write(path, os.str());
}

EpisodeLog load_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty log");
  json head;
  try {
    head = json::parse(line);
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  expect_schema(head, kEpisodeSchema, path);
  EpisodeLog log;
  log.method = head.value("method", "");
  log.scene_seed = head.value("scene_seed", 0ULL);
  log.initial_objects = head.value("initial_objects", 0);
  log.remaining_objects = head.value("remaining_objects", 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    AttemptRecord rec;
    rec.step = j.at("step").get<int>();
    rec.group = j.at("group").get<std::vector<int>>();
    rec.action.pose = Pose2::make(j.at("action").at("x").get<double>(),
                                  j.at("action").at("y").get<double>(),
                                  j.at("action").at("theta").get<double>());
    rec.gamma = j.at("gamma").get<double>();
    rec.n_g_pred = j.at("n_g_pred").get<double>();
    rec.score = j.at("score").get<double>();
    rec.n_g = j.at("n_g").get<int>();
    rec.final_width = j.at("final_width").get<double>();
    rec.retained = j.at("retained").get<std::vector<int>>();
    rec.planning_time_s = j.at("planning_time").get<double>();
    log.attempts.push_back(rec);
  }
  return log;
}

std::string metrics_csv(const std::vector<BenchRow>& rows,
                        const std::map<std::string, std::string>& config) {
  std::ostringstream os;
  os << "# " << kBenchSchema << "\n";
  os << "# config:";
  for (const auto& [k, v] : config) os << " " << k << "=" << v;
  os << "\n";
  os << "method,seed,success_rate,pph,grasped_objs,planning_time,cleared,"
        "pick_attempts\n";
  char buf[256];
  for (const BenchRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%llu,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n",
                  row.method.c_str(),
                  static_cast<unsigned long long>(row.seed),
                  row.metrics.success_rate, row.metrics.pph,
                  row.metrics.grasped_objs, row.metrics.planning_time,
                  row.metrics.cleared, row.metrics.pick_attempts);
    os << buf;
  }
  return os.str();
}

}  // namespace mograsp
