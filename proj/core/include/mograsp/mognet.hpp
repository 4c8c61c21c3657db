#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "mograsp/declutter.hpp"
#include "mograsp/grasp.hpp"
#include "mograsp/sim.hpp"

namespace mograsp {

inline constexpr int kFeatureDim = 65;  // 16 * 4 + 1
inline constexpr int kMaxGraspCount = 4;

struct FeatureVector {
  std::array<double, kFeatureDim> values{};
};

struct Sample {
  FeatureVector features;
  int label = 0;  // grasped-object count, 0..4
  std::uint64_t seed = 0;
  int step = 0;
};
using Dataset = std::vector<Sample>;

/// 65-dim encoding: four object slots of eight (x, y) vertices relative
/// to the grasp center, then the grasp orientation. Slots with fewer
/// vertices repeat the last vertex; groups with fewer objects repeat the
/// last object. Vertices stay CCW and start from the lexicographically
/// smallest (min y, then min x) vertex. Coordinates are raw millimetres;
/// scaling happens inside the network.
FeatureVector encode_features(const Scene& scene, const ObjectGroup& group,
                              const GraspAction& action);

struct MlpHyper {
  std::vector<int> hidden = {500, 300, 150, 50};
  double learning_rate = 1e-3;
  double l2_penalty = 1e-4;
  int batch_size = 200;
  int max_epochs = 200;
  int patience = 10;
  double early_stop_tol = 1e-4;
  double validation_fraction = 0.2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double feature_scale = 1.0 / 85.0;  // applied to coordinate entries
  std::uint64_t seed = 0;
};

/// Binary feedforward classifier: ReLU hidden layers, logistic output.
class MlpModel {
public:
  static MlpModel init(const std::vector<int>& layer_sizes,
                       double feature_scale, std::uint64_t seed);

  double predict_proba(const FeatureVector& x) const;
  void predict_proba_batch(const Eigen::MatrixXd& raw_features,
                           Eigen::VectorXd& out) const;

  /// Mean binary cross-entropy plus the L2 penalty on a batch, with
  /// analytic parameter gradients (used by training and the
  /// finite-difference checks).
  double loss_and_gradients(const Eigen::MatrixXd& raw_features,
                            const Eigen::VectorXd& targets, double l2_penalty,
                            std::vector<Eigen::MatrixXd>& grad_w,
                            std::vector<Eigen::VectorXd>& grad_b) const;

  std::vector<Eigen::MatrixXd> weights;  // weights[l]: out x in
  std::vector<Eigen::VectorXd> biases;
  double feature_scale = 1.0 / 85.0;
  bool trainable = true;
  double prior = 0.5;  // positive rate fallback when untrainable

private:
  Eigen::MatrixXd scaled(const Eigen::MatrixXd& raw) const;
};

struct TrainReport {
  int epochs_run = 0;
  double best_validation_loss = 0.0;
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;
};

/// Trains the one-vs-rest classifier for `class_id` with Adam mini-batch
/// descent; deterministic for a fixed hyper.seed. A class with fewer
/// than 10 positives (or negatives) yields an untrainable model that
/// predicts its prior. Throws DegenerateDataset on an empty dataset.
MlpModel train_binary(const Dataset& dataset, int class_id,
                      const MlpHyper& hyper, TrainReport* report = nullptr);

struct MogNetEnsemble {
  std::vector<MlpModel> models;  // one per class 0..4

  bool empty() const { return models.empty(); }
};

/// Five binary classifiers, seeds split per class from hyper.seed.
MogNetEnsemble train_ensemble(const Dataset& dataset, const MlpHyper& hyper,
                              int jobs = 1,
                              std::vector<TrainReport>* reports = nullptr);

/// Queries classes 0..n_o (trained classifiers only, priors when none is
/// trained) and returns the argmax class and its probability; ties break
/// toward the larger count.
std::pair<int, double> predict_count(const MogNetEnsemble& ensemble,
                                     const Scene& scene,
                                     const ObjectGroup& group,
                                     const GraspAction& action);

Predictor make_mognet_predictor(const MogNetEnsemble& ensemble);
Predictor make_total_area_predictor(const GripperSpec& spec);

enum class CollectMode { necessary_conditions, random };

struct CollectParams {
  GripperSpec gripper;
  NoiseModel noise;          // gamma estimation + execution noise
  SimParams sim;
  int n_p = 25;
  int n_theta = 12;
  int n_s = 5;
  int min_group_size = 2;    // multi-object groups only
  int target_samples = 1545;
  int max_group_draws = 4;   // random group redraws per step
  int jobs = 1;
};

/// Self-supervised collection: random multi-object groups, executed
/// grasps labeled by the simulator. In necessary_conditions mode the
/// executed grasp is argmax(gamma * A_T); in random mode it is a uniform
/// collision-free candidate. Scene seeds run spec.seed, spec.seed+1, ...
/// until target_samples records exist.
Dataset collect_dataset(const SceneSpec& scene_spec, int max_episodes,
                        const FrictionModel& friction, CollectMode mode,
                        const CollectParams& params);

}  // namespace mograsp
