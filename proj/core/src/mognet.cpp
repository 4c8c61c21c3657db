#include "mograsp/mognet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>

#include "mograsp/errors.hpp"
#include "mograsp/parallel.hpp"
#include "mograsp/random.hpp"

namespace mograsp {

FeatureVector encode_features(const Scene& scene, const ObjectGroup& group,
                              const GraspAction& action) {
  if (group.members.empty() || group.size() > kMaxGraspCount) {
    throw EncodingError("group size must be 1..4");
  }
  FeatureVector out;
  const Point2 center = action.pose.position();

  int slot = 0;
  int last_slot_start = 0;
  for (int m : group.members) {
    const ConvexPolygon& poly = scene.at(static_cast<std::size_t>(m));
    const std::size_t n = poly.size();
    if (n > 8) {
      throw EncodingError("object exceeds 8 vertices");
    }
    // CCW order starting from the lexicographically smallest vertex.
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const Point2 a = poly.vertex(i);
      const Point2 b = poly.vertex(start);
      if (a.y < b.y || (a.y == b.y && a.x < b.x)) start = i;
    }
    const int base = slot * 16;
    last_slot_start = base;
    for (std::size_t k = 0; k < 8; ++k) {
      const std::size_t i = std::min(k, n - 1);
      const Point2 p = poly.vertex((start + i) % n) - center;
      out.values[base + 2 * k] = p.x;
      out.values[base + 2 * k + 1] = p.y;
    }
    ++slot;
  }
  // Groups below four objects repeat the last object's vertices.
  for (; slot < kMaxGraspCount; ++slot) {
    for (int k = 0; k < 16; ++k) {
      out.values[slot * 16 + k] = out.values[last_slot_start + k];
    }
  }
  out.values[kFeatureDim - 1] = action.pose.theta;
  return out;
}

Eigen::MatrixXd MlpModel::scaled(const Eigen::MatrixXd& raw) const {
  Eigen::MatrixXd x = raw;
  x.leftCols(kFeatureDim - 1) *= feature_scale;
  return x;
}

MlpModel MlpModel::init(const std::vector<int>& layer_sizes,
                        double feature_scale, std::uint64_t seed) {
  MlpModel model;
  model.feature_scale = feature_scale;
  std::mt19937_64 rng = make_rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = u(rng);
    }
    Eigen::VectorXd b(fan_out);
    for (int r = 0; r < fan_out; ++r) b(r) = u(rng);
    model.weights.push_back(std::move(w));
    model.biases.push_back(std::move(b));
  }
  return model;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void forward_pass(const std::vector<Eigen::MatrixXd>& weights,
                  const std::vector<Eigen::VectorXd>& biases,
                  const Eigen::MatrixXd& x,
                  std::vector<Eigen::MatrixXd>& activations) {
  activations.clear();
  activations.push_back(x);
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Eigen::MatrixXd z =
        (activations.back() * weights[l].transpose()).rowwise() +
        biases[l].transpose();
    if (l + 1 < weights.size()) {
      activations.push_back(z.cwiseMax(0.0));  // ReLU
    } else {
      activations.push_back(z.unaryExpr([](double v) { return sigmoid(v); }));
    }
  }
}

}  // namespace

void MlpModel::predict_proba_batch(const Eigen::MatrixXd& raw_features,
                                   Eigen::VectorXd& out) const {
  if (!trainable) {
    out = Eigen::VectorXd::Constant(raw_features.rows(), prior);
    return;
  }
  std::vector<Eigen::MatrixXd> acts;
  forward_pass(weights, biases, scaled(raw_features), acts);
  out = acts.back().col(0);
}

double MlpModel::predict_proba(const FeatureVector& x) const {
  Eigen::MatrixXd raw(1, kFeatureDim);
  for (int i = 0; i < kFeatureDim; ++i) raw(0, i) = x.values[i];
  Eigen::VectorXd out;
  predict_proba_batch(raw, out);
  return out(0);
}

double MlpModel::loss_and_gradients(const Eigen::MatrixXd& raw_features,
                                    const Eigen::VectorXd& targets,
                                    double l2_penalty,
                                    std::vector<Eigen::MatrixXd>& grad_w,
                                    std::vector<Eigen::VectorXd>& grad_b) const {
  const double n = static_cast<double>(raw_features.rows());
  std::vector<Eigen::MatrixXd> acts;
  forward_pass(weights, biases, scaled(raw_features), acts);
  const Eigen::VectorXd p = acts.back().col(0);

  double loss = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = std::clamp(p(i), 1e-10, 1.0 - 1e-10);
    loss -= targets(i) * std::log(pi) + (1.0 - targets(i)) * std::log(1.0 - pi);
  }
  loss /= n;
  for (const Eigen::MatrixXd& w : weights) {
    loss += 0.5 * l2_penalty * w.squaredNorm() / n;
  }

  grad_w.assign(weights.size(), Eigen::MatrixXd());
  grad_b.assign(weights.size(), Eigen::VectorXd());
  Eigen::MatrixXd delta = (p - targets) / n;  // d(loss)/dz_L
  for (std::size_t l = weights.size(); l-- > 0;) {
    grad_w[l] = delta.transpose() * acts[l] + (l2_penalty / n) * weights[l];
    grad_b[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd back = delta * weights[l];
      delta = back.cwiseProduct(
          acts[l].unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    }
  }
  return loss;
}

namespace {

double validation_loss(const MlpModel& model, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& y) {
  Eigen::VectorXd p;
  model.predict_proba_batch(x, p);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = std::clamp(p(i), 1e-10, 1.0 - 1e-10);
    loss -= y(i) * std::log(pi) + (1.0 - y(i)) * std::log(1.0 - pi);
  }
  return loss / static_cast<double>(std::max<Eigen::Index>(1, p.size()));
}

double accuracy(const MlpModel& model, const Eigen::MatrixXd& x,
                const Eigen::VectorXd& y) {
  if (x.rows() == 0) return 0.0;
  Eigen::VectorXd p;
  model.predict_proba_batch(x, p);
  int hits = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if ((p(i) >= 0.5) == (y(i) >= 0.5)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(p.size());
}

}  // namespace

MlpModel train_binary(const Dataset& dataset, int class_id,
                      const MlpHyper& hyper, TrainReport* report) {
  if (dataset.empty()) throw DegenerateDataset("empty training dataset");
  if (class_id < 0 || class_id > kMaxGraspCount) {
    throw DegenerateDataset("class id outside 0..4");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  Eigen::MatrixXd x(n, kFeatureDim);
  Eigen::VectorXd y(n);
  Eigen::Index positives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < kFeatureDim; ++k) {
      x(i, k) = dataset[static_cast<std::size_t>(i)].features.values[k];
    }
    const bool pos = dataset[static_cast<std::size_t>(i)].label == class_id;
    y(i) = pos ? 1.0 : 0.0;
    positives += pos ? 1 : 0;
  }

  std::vector<int> layers;
  layers.push_back(kFeatureDim);
  for (int h : hyper.hidden) layers.push_back(h);
  layers.push_back(1);
  MlpModel model = MlpModel::init(layers, hyper.feature_scale, hyper.seed);
  model.prior = static_cast<double>(positives) / static_cast<double>(n);

  if (positives < 10 || n - positives < 10) {
    model.trainable = false;
    if (report) *report = TrainReport{};
    return model;
  }

  // Seeded shuffle, then an 80/20 train/validation split.
  std::mt19937_64 rng = make_rng(derive_seed(hyper.seed, 0x5350314CULL));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const Eigen::Index n_val = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(hyper.validation_fraction *
                                   static_cast<double>(n)));
  const Eigen::Index n_train = n - n_val;
  if (n_train < 2) throw DegenerateDataset("dataset too small to split");

  Eigen::MatrixXd x_train(n_train, kFeatureDim), x_val(n_val, kFeatureDim);
  Eigen::VectorXd y_train(n_train), y_val(n_val);
  for (Eigen::Index i = 0; i < n_train; ++i) {
    x_train.row(i) = x.row(order[static_cast<std::size_t>(i)]);
    y_train(i) = y(order[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index i = 0; i < n_val; ++i) {
    x_val.row(i) = x.row(order[static_cast<std::size_t>(n_train + i)]);
    y_val(i) = y(order[static_cast<std::size_t>(n_train + i)]);
  }

  // Adam state.
  std::vector<Eigen::MatrixXd> m_w, v_w, grad_w;
  std::vector<Eigen::VectorXd> m_b, v_b, grad_b;
  for (const Eigen::MatrixXd& w : model.weights) {
    m_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    v_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const Eigen::VectorXd& b : model.biases) {
    m_b.push_back(Eigen::VectorXd::Zero(b.size()));
    v_b.push_back(Eigen::VectorXd::Zero(b.size()));
  }

  const int batch = std::max(1, std::min<int>(hyper.batch_size,
                                              static_cast<int>(n_train)));
  std::vector<Eigen::Index> train_order(static_cast<std::size_t>(n_train));
  std::iota(train_order.begin(), train_order.end(), 0);

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Eigen::MatrixXd> best_w = model.weights;
  std::vector<Eigen::VectorXd> best_b = model.biases;
  int stall = 0;
  long t = 0;
  int epochs = 0;

  for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
    std::shuffle(train_order.begin(), train_order.end(), rng);
    for (Eigen::Index begin = 0; begin < n_train; begin += batch) {
      const Eigen::Index count = std::min<Eigen::Index>(batch, n_train - begin);
      Eigen::MatrixXd xb(count, kFeatureDim);
      Eigen::VectorXd yb(count);
      for (Eigen::Index i = 0; i < count; ++i) {
        xb.row(i) = x_train.row(train_order[static_cast<std::size_t>(begin + i)]);
        yb(i) = y_train(train_order[static_cast<std::size_t>(begin + i)]);
      }
      model.loss_and_gradients(xb, yb, hyper.l2_penalty, grad_w, grad_b);
      ++t;
      const double lr_t = hyper.learning_rate *
                          std::sqrt(1.0 - std::pow(hyper.beta2, t)) /
                          (1.0 - std::pow(hyper.beta1, t));
      for (std::size_t l = 0; l < model.weights.size(); ++l) {
        m_w[l] = hyper.beta1 * m_w[l] + (1.0 - hyper.beta1) * grad_w[l];
        v_w[l] = hyper.beta2 * v_w[l] +
                 (1.0 - hyper.beta2) * grad_w[l].cwiseProduct(grad_w[l]);
        model.weights[l] -=
            lr_t *
            (m_w[l].array() / (v_w[l].array().sqrt() + hyper.adam_eps))
                .matrix();
        m_b[l] = hyper.beta1 * m_b[l] + (1.0 - hyper.beta1) * grad_b[l];
        v_b[l] = hyper.beta2 * v_b[l] +
                 (1.0 - hyper.beta2) * grad_b[l].cwiseProduct(grad_b[l]);
        model.biases[l] -=
            lr_t *
            (m_b[l].array() / (v_b[l].array().sqrt() + hyper.adam_eps))
                .matrix();
      }
    }
    ++epochs;
    const double val = validation_loss(model, x_val, y_val);
    if (val < best_val - hyper.early_stop_tol) {
      best_val = val;
      best_w = model.weights;
      best_b = model.biases;
      stall = 0;
    } else {
      ++stall;
      if (stall >= hyper.patience) break;
    }
  }

  model.weights = best_w;
  model.biases = best_b;
  if (report) {
    report->epochs_run = epochs;
    report->best_validation_loss = best_val;
    report->train_accuracy = accuracy(model, x_train, y_train);
    report->validation_accuracy = accuracy(model, x_val, y_val);
  }
  return model;
}

MogNetEnsemble train_ensemble(const Dataset& dataset, const MlpHyper& hyper,
                              int jobs, std::vector<TrainReport>* reports) {
  MogNetEnsemble ensemble;
  ensemble.models.resize(kMaxGraspCount + 1);
  if (reports) reports->assign(kMaxGraspCount + 1, TrainReport{});
  parallel_for_indexed(kMaxGraspCount + 1, jobs, [&](std::size_t c) {
    MlpHyper class_hyper = hyper;
    class_hyper.seed = derive_seed(hyper.seed, c);
    TrainReport rep;
    ensemble.models[c] =
        train_binary(dataset, static_cast<int>(c), class_hyper, &rep);
    if (reports) (*reports)[c] = rep;
  });
  return ensemble;
}

std::pair<int, double> predict_count(const MogNetEnsemble& ensemble,
                                     const Scene& scene,
                                     const ObjectGroup& group,
                                     const GraspAction& action) {
  if (ensemble.models.empty()) throw DegenerateInput("untrained ensemble");
  const FeatureVector f = encode_features(scene, group, action);
  const int n_o = std::min(group.size(), kMaxGraspCount);

  bool any_trained = false;
  for (int c = 0; c <= n_o; ++c) {
    if (ensemble.models[static_cast<std::size_t>(c)].trainable) {
      any_trained = true;
    }
  }
  int best_c = 0;
  double best_p = -1.0;
  for (int c = 0; c <= n_o; ++c) {
    const MlpModel& model = ensemble.models[static_cast<std::size_t>(c)];
    if (any_trained && !model.trainable) continue;
    const double p = model.predict_proba(f);
    if (p >= best_p) {  // ties break toward the larger count
      best_p = p;
      best_c = c;
    }
  }
  return {best_c, best_p};
}

Predictor make_mognet_predictor(const MogNetEnsemble& ensemble) {
  auto shared = std::make_shared<const MogNetEnsemble>(ensemble);
  return [shared](const Scene& scene, const ObjectGroup& group,
                  const GraspAction& action) {
    return static_cast<double>(
        predict_count(*shared, scene, group, action).first);
  };
}

Predictor make_total_area_predictor(const GripperSpec& spec) {
  return [spec](const Scene& scene, const ObjectGroup& group,
                const GraspAction& action) {
    return total_intersection_area(scene, group, action, spec);
  };
}

namespace {

struct EpisodeCollection {
  std::vector<Sample> samples;
};

EpisodeCollection collect_episode(const SceneSpec& scene_spec,
                                  std::uint64_t seed,
                                  const FrictionModel& friction,
                                  CollectMode mode,
                                  const CollectParams& params) {
  EpisodeCollection out;
  SceneSpec spec = scene_spec;
  spec.seed = seed;
  Scene scene = generate_scene(spec);

  const int budget = 3 * static_cast<int>(scene.size());
  for (int step = 0; step < budget; ++step) {
    if (static_cast<int>(scene.size()) < params.min_group_size) break;

    std::vector<ObjectGroup> groups = create_obj_groups(scene, params.gripper);
    std::vector<ObjectGroup> multi;
    for (ObjectGroup& g : groups) {
      if (g.size() >= params.min_group_size) multi.push_back(std::move(g));
    }
    if (multi.empty()) break;

    std::mt19937_64 rng = make_rng(
        derive_seed(seed, 0x67726F7570ULL, static_cast<std::uint64_t>(step)));
    std::shuffle(multi.begin(), multi.end(), rng);

    bool executed = false;
    const int draws =
        std::min<int>(params.max_group_draws, static_cast<int>(multi.size()));
    for (int d = 0; d < draws && !executed; ++d) {
      const ObjectGroup& group = multi[static_cast<std::size_t>(d)];
      const std::vector<GraspAction> cands = gen_grasp_cands(
          scene, group, params.gripper, params.n_p, params.n_theta);
      if (cands.empty()) continue;

      GraspAction action;
      bool chosen = false;
      if (mode == CollectMode::random) {
        std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
        action = cands[pick(rng)];
        chosen = true;
      } else {
        double best_score = 0.0;
        for (std::size_t k = 0; k < cands.size(); ++k) {
          NoiseModel noise = params.noise;
          noise.seed = derive_seed(seed, static_cast<std::uint64_t>(step),
                                   static_cast<std::uint64_t>(k));
          const double gamma =
              necessary_conds_proba(scene, group, cands[k], params.gripper,
                                    friction, noise, params.n_s);
          if (gamma <= 0.0) continue;
          const double area = total_intersection_area(scene, group, cands[k],
                                                      params.gripper);
          const double score = gamma * area;
          if (score > best_score) {
            best_score = score;
            action = cands[k];
            chosen = true;
          }
        }
      }
      if (!chosen) continue;

      NoiseModel exec_noise = params.noise;
      exec_noise.seed =
          derive_seed(seed, 0x65786563ULL, static_cast<std::uint64_t>(step));
      const SimOutcome outcome = simulate_grasp(
          scene, action, params.gripper, friction, exec_noise, params.sim);

      Sample sample;
      sample.features = encode_features(scene, group, action);
      sample.label = std::min(outcome.n_g, group.size());
      sample.seed = seed;
      sample.step = step;
      out.samples.push_back(sample);

      Scene next;
      for (std::size_t i = 0; i < scene.size(); ++i) {
        if (std::find(outcome.retained.begin(), outcome.retained.end(),
                      static_cast<int>(i)) != outcome.retained.end()) {
          continue;
        }
        next.push_back(outcome.post_scene[i]);
      }
      scene = std::move(next);
      executed = true;
    }
    if (!executed) break;
  }
  return out;
}

}  // namespace

Dataset collect_dataset(const SceneSpec& scene_spec, int max_episodes,
                        const FrictionModel& friction, CollectMode mode,
                        const CollectParams& params) {
  Dataset dataset;
  const int wave = std::max(1, params.jobs);
  int episode = 0;
  while (static_cast<int>(dataset.size()) < params.target_samples &&
         episode < max_episodes) {
    const int count = std::min(wave, max_episodes - episode);
    std::vector<EpisodeCollection> results(static_cast<std::size_t>(count));
    parallel_for_indexed(static_cast<std::size_t>(count), params.jobs,
                         [&](std::size_t i) {
                           results[i] = collect_episode(
                               scene_spec,
                               scene_spec.seed + static_cast<std::uint64_t>(
                                                     episode + static_cast<int>(i)),
                               friction, mode, params);
                         });
    for (const EpisodeCollection& r : results) {
      for (const Sample& s : r.samples) {
        if (static_cast<int>(dataset.size()) >= params.target_samples) break;
        dataset.push_back(s);
      }
    }
    episode += count;
  }
  return dataset;
}

}  // namespace mograsp
