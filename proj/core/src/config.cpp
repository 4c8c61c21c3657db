#include "mograsp/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "mograsp/errors.hpp"

namespace mograsp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + key + ": '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::uint64_t>(u);
  } catch (const std::exception&) {
    throw ConfigError("bad seed value for " + key + ": '" + v + "'");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void Config::apply_line(const std::string& key, const std::string& value) {
  if (key == "max_width") max_width = to_double(key, value);
  else if (key == "jaw_length") jaw_length = to_double(key, value);
  else if (key == "jaw_thickness") jaw_thickness = to_double(key, value);
  else if (key == "max_force") max_force = to_double(key, value);
  else if (key == "mu_frictional") mu_frictional = to_double(key, value);
  else if (key == "mu_frictionless") mu_frictionless = to_double(key, value);
  else if (key == "n_p") n_p = to_int(key, value);
  else if (key == "n_theta") n_theta = to_int(key, value);
  else if (key == "n_s") n_s = to_int(key, value);
  else if (key == "n_mc") n_mc = to_int(key, value);
  else if (key == "sigma_u_xy") sigma_u_xy = to_double(key, value);
  else if (key == "sigma_u_theta_deg") sigma_u_theta_deg = to_double(key, value);
  else if (key == "sigma_x") sigma_x = to_double(key, value);
  else if (key == "hidden") hidden = value;
  else if (key == "learning_rate") learning_rate = to_double(key, value);
  else if (key == "l2_penalty") l2_penalty = to_double(key, value);
  else if (key == "batch_size") batch_size = to_int(key, value);
  else if (key == "max_epochs") max_epochs = to_int(key, value);
  else if (key == "patience") patience = to_int(key, value);
  else if (key == "validation_fraction") validation_fraction = to_double(key, value);
  else if (key == "tau_contain") tau_contain = to_double(key, value);
  else if (key == "colinearity_tol") colinearity_tol = to_double(key, value);
  else if (key == "support_ns") support_ns = to_int(key, value);
  else if (key == "settle_band") settle_band = to_double(key, value);
  else if (key == "motion_time") motion_time = to_double(key, value);
  else if (key == "attempt_budget_factor") attempt_budget_factor = to_int(key, value);
  else if (key == "min_group_size") min_group_size = to_int(key, value);
  else if (key == "target_samples") target_samples = to_int(key, value);
  else if (key == "object_count") object_count = to_int(key, value);
  else if (key == "min_vertices") min_vertices = to_int(key, value);
  else if (key == "max_vertices") max_vertices = to_int(key, value);
  else if (key == "min_size") min_size = to_double(key, value);
  else if (key == "max_size") max_size = to_double(key, value);
  else if (key == "region_width") region_width = to_double(key, value);
  else if (key == "region_height") region_height = to_double(key, value);
  else if (key == "clustering") clustering = to_double(key, value);
  else if (key == "margin") margin = to_double(key, value);
  else if (key == "seed") seed = to_u64(key, value);
  else if (key == "jobs") jobs = to_int(key, value);
  else throw ConfigError("unknown config key: " + key);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not key = value");
    }
    cfg.apply_line(trim(stripped.substr(0, eq)),
                   trim(stripped.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

void Config::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config validation failed: " + what);
  };
  require(max_width > 0.0, "max_width > 0");
  require(jaw_length > 0.0, "jaw_length > 0");
  require(jaw_thickness > 0.0, "jaw_thickness > 0");
  require(mu_frictional >= 0.0 && mu_frictional <= 2.0, "mu in [0,2]");
  require(mu_frictionless >= 0.0 && mu_frictionless <= 2.0, "mu in [0,2]");
  require(n_p >= 1, "n_p >= 1");
  require(n_theta >= 1, "n_theta >= 1");
  require(n_s >= 1, "n_s >= 1");
  require(n_mc >= 1, "n_mc >= 1");
  require(sigma_u_xy >= 0.0 && sigma_x >= 0.0 && sigma_u_theta_deg >= 0.0,
          "noise std-devs >= 0");
  require(batch_size >= 1 && max_epochs >= 1 && patience >= 1,
          "training budget positive");
  require(validation_fraction > 0.0 && validation_fraction < 1.0,
          "validation_fraction in (0,1)");
  require(tau_contain >= 0.0 && tau_contain <= 1.0, "tau_contain in [0,1]");
  require(colinearity_tol > 0.0, "colinearity_tol > 0");
  require(support_ns >= 1, "support_ns >= 1");
  require(settle_band >= 0.0, "settle_band >= 0");
  require(motion_time > 0.0, "motion_time > 0");
  require(attempt_budget_factor >= 1, "attempt_budget_factor >= 1");
  require(min_group_size >= 1 && min_group_size <= 4, "min_group_size in 1..4");
  require(target_samples >= 1, "target_samples >= 1");
  require(object_count >= 0, "object_count >= 0");
  require(min_vertices >= 3 && max_vertices <= 8 &&
              min_vertices <= max_vertices,
          "vertex counts in 3..8");
  require(min_size > 0.0 && max_size >= min_size, "object sizes positive");
  require(region_width > 0.0 && region_height > 0.0, "region positive");
  require(clustering >= 0.0 && clustering <= 1.0, "clustering in [0,1]");
  require(margin >= 0.0, "margin >= 0");
  require(jobs >= 1, "jobs >= 1");

  std::stringstream hs(hidden);
  std::string tok;
  int layers = 0;
  while (std::getline(hs, tok, ',')) {
    if (tok.empty()) continue;
    int v = 0;
    try {
      v = std::stoi(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad hidden layer size: " + tok);
    }
    require(v >= 1, "hidden layer sizes >= 1");
    ++layers;
  }
  require(layers >= 1, "at least one hidden layer");
}

std::map<std::string, std::string> Config::as_map() const {
  std::map<std::string, std::string> m;
  m["max_width"] = fmt(max_width);
  m["jaw_length"] = fmt(jaw_length);
  m["jaw_thickness"] = fmt(jaw_thickness);
  m["max_force"] = fmt(max_force);
  m["mu_frictional"] = fmt(mu_frictional);
  m["mu_frictionless"] = fmt(mu_frictionless);
  m["n_p"] = std::to_string(n_p);
  m["n_theta"] = std::to_string(n_theta);
  m["n_s"] = std::to_string(n_s);
  m["n_mc"] = std::to_string(n_mc);
  m["sigma_u_xy"] = fmt(sigma_u_xy);
  m["sigma_u_theta_deg"] = fmt(sigma_u_theta_deg);
  m["sigma_x"] = fmt(sigma_x);
  m["hidden"] = hidden;
  m["learning_rate"] = fmt(learning_rate);
  m["l2_penalty"] = fmt(l2_penalty);
  m["batch_size"] = std::to_string(batch_size);
  m["max_epochs"] = std::to_string(max_epochs);
  m["patience"] = std::to_string(patience);
  m["validation_fraction"] = fmt(validation_fraction);
  m["tau_contain"] = fmt(tau_contain);
  m["colinearity_tol"] = fmt(colinearity_tol);
  m["support_ns"] = std::to_string(support_ns);
  m["settle_band"] = fmt(settle_band);
  m["motion_time"] = fmt(motion_time);
  m["attempt_budget_factor"] = std::to_string(attempt_budget_factor);
  m["min_group_size"] = std::to_string(min_group_size);
  m["target_samples"] = std::to_string(target_samples);
  m["object_count"] = std::to_string(object_count);
  m["min_vertices"] = std::to_string(min_vertices);
  m["max_vertices"] = std::to_string(max_vertices);
  m["min_size"] = fmt(min_size);
  m["max_size"] = fmt(max_size);
  m["region_width"] = fmt(region_width);
  m["region_height"] = fmt(region_height);
  m["clustering"] = fmt(clustering);
  m["margin"] = fmt(margin);
  m["seed"] = std::to_string(seed);
  // jobs is deliberately not echoed: results are identical for any worker
  // count, and output artifacts must be byte-identical across --jobs.
  return m;
}

GripperSpec Config::gripper() const {
  return GripperSpec{max_width, jaw_length, jaw_thickness, max_force};
}

NoiseModel Config::noise() const {
  NoiseModel n;
  n.sigma_u_x = sigma_u_xy;
  n.sigma_u_y = sigma_u_xy;
  n.sigma_u_theta = sigma_u_theta_deg * M_PI / 180.0;
  n.sigma_x = sigma_x;
  n.n_mc = n_mc;
  n.seed = seed;
  return n;
}

SimParams Config::sim_params() const {
  SimParams p;
  p.tau_contain = tau_contain;
  p.colinearity_tol = colinearity_tol;
  p.support_ns = support_ns;
  p.fit_ns = n_s;
  p.settle_band = settle_band;
  return p;
}

SceneSpec Config::scene_spec() const {
  SceneSpec s;
  s.seed = seed;
  s.object_count = object_count;
  s.min_vertices = min_vertices;
  s.max_vertices = max_vertices;
  s.min_size = min_size;
  s.max_size = max_size;
  s.region_width = region_width;
  s.region_height = region_height;
  s.clustering = clustering;
  s.margin = margin;
  return s;
}

MlpHyper Config::mlp_hyper() const {
  MlpHyper h;
  h.hidden.clear();
  std::stringstream hs(hidden);
  std::string tok;
  while (std::getline(hs, tok, ',')) {
    if (!tok.empty()) h.hidden.push_back(std::stoi(tok));
  }
  h.learning_rate = learning_rate;
  h.l2_penalty = l2_penalty;
  h.batch_size = batch_size;
  h.max_epochs = max_epochs;
  h.patience = patience;
  h.validation_fraction = validation_fraction;
  h.feature_scale = 1.0 / max_width;
  h.seed = seed;
  return h;
}

DeclutterConfig Config::declutter_config() const {
  DeclutterConfig d;
  d.gripper = gripper();
  d.noise = noise();
  d.sim = sim_params();
  d.n_p = n_p;
  d.n_theta = n_theta;
  d.n_s = n_s;
  d.attempt_budget_factor = attempt_budget_factor;
  d.motion_time_s = motion_time;
  d.jobs = jobs;
  d.seed = seed;
  return d;
}

CollectParams Config::collect_params() const {
  CollectParams c;
  c.gripper = gripper();
  c.noise = noise();
  c.sim = sim_params();
  c.n_p = n_p;
  c.n_theta = n_theta;
  c.n_s = n_s;
  c.min_group_size = min_group_size;
  c.target_samples = target_samples;
  c.jobs = jobs;
  return c;
}

FrictionModel Config::friction(bool frictional) const {
  return FrictionModel::from_mu(frictional ? mu_frictional : mu_frictionless);
}

}  // namespace mograsp
