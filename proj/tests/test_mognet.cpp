#include <doctest.h>

#include <cmath>
#include <random>

#include "mograsp/errors.hpp"
#include "mograsp/mognet.hpp"
#include "oracles.hpp"

using namespace mograsp;

namespace {

ConvexPolygon right_triangle() {
  return ConvexPolygon::from_points({{0, 0}, {30, 0}, {0, 40}});
}

Dataset synthetic_blobs(int n, double separation, std::uint64_t seed,
                        double positive_rate = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset data;
  for (int i = 0; i < n; ++i) {
    const bool positive = unit(rng) < positive_rate;
    Sample s;
    for (int k = 0; k < kFeatureDim; ++k) {
      s.features.values[static_cast<std::size_t>(k)] =
          gauss(rng) * 10.0 + (positive ? separation : -separation);
    }
    s.label = positive ? 1 : 0;
    s.seed = seed;
    s.step = i;
    data.push_back(s);
  }
  return data;
}

MlpHyper small_hyper(std::uint64_t seed) {
  MlpHyper h;
  h.hidden = {16, 8};
  h.max_epochs = 60;
  h.patience = 60;  // no early stop in the small tests
  h.batch_size = 64;
  h.seed = seed;
  return h;
}

}  // namespace

TEST_CASE("feature encoding pads vertices and object slots") {
  Scene scene;
  scene.push_back(right_triangle());
  const ObjectGroup group{{0}};
  const GraspAction a{Pose2::make(0, 0, 0.3)};
  const FeatureVector f = encode_features(scene, group, a);

  // Slot 0: starts from the lexicographically smallest vertex (0,0).
  CHECK(f.values[0] == 0.0);
  CHECK(f.values[1] == 0.0);
  CHECK(f.values[2] == 30.0);
  CHECK(f.values[3] == 0.0);
  CHECK(f.values[4] == 0.0);
  CHECK(f.values[5] == 40.0);
  // Vertices 4..8 repeat the last vertex.
  for (int k = 3; k < 8; ++k) {
    CHECK(f.values[2 * k] == 0.0);
    CHECK(f.values[2 * k + 1] == 40.0);
  }
  // Slots 2..4 repeat slot 1.
  for (int slot = 1; slot < 4; ++slot) {
    for (int k = 0; k < 16; ++k) {
      CHECK(f.values[slot * 16 + k] == f.values[k]);
    }
  }
  CHECK(f.values[64] == doctest::Approx(0.3));
}

TEST_CASE("feature encoding is relative to the grasp center") {
  std::mt19937_64 rng(3);
  const ConvexPolygon octagon = oracle::random_convex_polygon(rng, 25, 30, 8);
  Scene scene;
  scene.push_back(octagon);
  const ObjectGroup group{{0}};

  // Grasp at the vertex mean: slot-0 coordinates sum to (0, 0).
  if (octagon.size() == 8) {
    Point2 mean{0, 0};
    for (const Point2& p : octagon.vertices()) mean = mean + p;
    mean = mean * (1.0 / 8.0);
    const GraspAction at_mean{Pose2::make(mean.x, mean.y, 0)};
    const FeatureVector f = encode_features(scene, group, at_mean);
    double sx = 0.0, sy = 0.0;
    for (int k = 0; k < 8; ++k) {
      sx += f.values[2 * k];
      sy += f.values[2 * k + 1];
    }
    CHECK(std::abs(sx) < 1e-9);
    CHECK(std::abs(sy) < 1e-9);
  }

  // Joint translation of scene and grasp leaves the vector unchanged.
  const GraspAction a{Pose2::make(5.0, -3.0, 1.1)};
  const FeatureVector f0 = encode_features(scene, group, a);
  Scene shifted;
  shifted.push_back(octagon.translated({10.0, 10.0}));
  const GraspAction a_shifted{Pose2::make(15.0, 7.0, 1.1)};
  const FeatureVector f1 = encode_features(shifted, group, a_shifted);
  for (int k = 0; k < kFeatureDim; ++k) {
    CHECK(f0.values[k] == doctest::Approx(f1.values[k]).epsilon(1e-12));
  }

  // Changing only the grasp orientation changes only the last element.
  const GraspAction a_rot{Pose2::make(5.0, -3.0, 1.4)};
  const FeatureVector f2 = encode_features(scene, group, a_rot);
  for (int k = 0; k < kFeatureDim - 1; ++k) {
    CHECK(f2.values[k] == f0.values[k]);
  }
  CHECK(f2.values[64] == doctest::Approx(1.4));
}

TEST_CASE("feature encoding rejects oversized input") {
  std::vector<Point2> nine;
  for (int i = 0; i < 9; ++i) {
    const double a = 2.0 * M_PI * i / 9.0;
    nine.push_back({30.0 * std::cos(a), 30.0 * std::sin(a)});
  }
  Scene scene;
  scene.push_back(ConvexPolygon::from_points(nine));
  CHECK_THROWS_AS(
      encode_features(scene, {{0}}, GraspAction{Pose2::make(0, 0, 0)}),
      EncodingError);

  Scene squares;
  for (int i = 0; i < 5; ++i) {
    squares.push_back(right_triangle().translated({i * 50.0, 0}));
  }
  CHECK_THROWS_AS(encode_features(squares, {{0, 1, 2, 3, 4}},
                                  GraspAction{Pose2::make(0, 0, 0)}),
                  EncodingError);
}

TEST_CASE("training separates linearly separable blobs") {
  const Dataset data = synthetic_blobs(400, 8.0, 11);
  TrainReport report;
  const MlpModel model = train_binary(data, 1, small_hyper(5), &report);
  CHECK(model.trainable);
  CHECK(report.train_accuracy >= 0.99);
}

TEST_CASE("label-shuffled data trains to the base rate") {
  Dataset data = synthetic_blobs(500, 8.0, 13, 0.3);
  std::mt19937_64 rng(7);
  std::vector<int> labels;
  for (const Sample& s : data) labels.push_back(s.label);
  std::shuffle(labels.begin(), labels.end(), rng);
  for (std::size_t i = 0; i < data.size(); ++i) data[i].label = labels[i];

  int positives = 0;
  for (const Sample& s : data) positives += s.label == 1 ? 1 : 0;
  const double base =
      std::max(static_cast<double>(positives) / data.size(),
               1.0 - static_cast<double>(positives) / data.size());

  TrainReport report;
  train_binary(data, 1, small_hyper(17), &report);
  CHECK(report.validation_accuracy >= base - 0.05);
  CHECK(report.validation_accuracy <= base + 0.05);
}

TEST_CASE("analytic gradients match central finite differences") {
  const Dataset data = synthetic_blobs(24, 3.0, 19);
  MlpHyper hyper = small_hyper(23);
  std::vector<int> layers = {kFeatureDim, 16, 8, 1};
  MlpModel model = MlpModel::init(layers, hyper.feature_scale, 23);

  Eigen::MatrixXd x(24, kFeatureDim);
  Eigen::VectorXd y(24);
  for (int i = 0; i < 24; ++i) {
    for (int k = 0; k < kFeatureDim; ++k) {
      x(i, k) = data[static_cast<std::size_t>(i)].features.values[k];
    }
    y(i) = data[static_cast<std::size_t>(i)].label;
  }

  std::vector<Eigen::MatrixXd> grad_w;
  std::vector<Eigen::VectorXd> grad_b;
  model.loss_and_gradients(x, y, 1e-4, grad_w, grad_b);

  std::mt19937_64 rng(29);
  int checked = 0;
  double worst = 0.0;
  while (checked < 100) {
    const std::size_t l = rng() % model.weights.size();
    Eigen::MatrixXd& w = model.weights[l];
    const Eigen::Index r = static_cast<Eigen::Index>(rng() % w.rows());
    const Eigen::Index c = static_cast<Eigen::Index>(rng() % w.cols());
    const double orig = w(r, c);
    const double h = 1e-6 * std::max(1.0, std::abs(orig));
    std::vector<Eigen::MatrixXd> tmp_w;
    std::vector<Eigen::VectorXd> tmp_b;
    w(r, c) = orig + h;
    const double lp = model.loss_and_gradients(x, y, 1e-4, tmp_w, tmp_b);
    w(r, c) = orig - h;
    const double lm = model.loss_and_gradients(x, y, 1e-4, tmp_w, tmp_b);
    w(r, c) = orig;
    const double fd = (lp - lm) / (2.0 * h);
    const double analytic = grad_w[l](r, c);
    const double denom = std::max(std::abs(fd) + std::abs(analytic), 1e-8);
    const double rel = std::abs(fd - analytic) / denom;
    worst = std::max(worst, rel);
    ++checked;
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("training is bitwise reproducible for a fixed seed") {
  const Dataset data = synthetic_blobs(300, 5.0, 31);
  MlpHyper hyper = small_hyper(41);
  hyper.max_epochs = 10;
  const MlpModel a = train_binary(data, 1, hyper);
  const MlpModel b = train_binary(data, 1, hyper);
  REQUIRE(a.weights.size() == b.weights.size());
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    CHECK(a.weights[l] == b.weights[l]);
    CHECK(a.biases[l] == b.biases[l]);
  }
}

TEST_CASE("rare classes yield an untrainable prior model") {
  Dataset data = synthetic_blobs(200, 5.0, 37, 0.0);  // all negatives
  for (int i = 0; i < 5; ++i) data[static_cast<std::size_t>(i)].label = 1;
  const MlpModel model = train_binary(data, 1, small_hyper(43));
  CHECK_FALSE(model.trainable);
  CHECK(model.prior == doctest::Approx(5.0 / 200.0));
  FeatureVector f;
  CHECK(model.predict_proba(f) == doctest::Approx(model.prior));

  CHECK_THROWS_AS(train_binary({}, 1, small_hyper(1)), DegenerateDataset);
}

TEST_CASE("predict_count takes the argmax over queryable classes") {
  // All-untrainable ensemble: predictions fall back to the priors.
  MogNetEnsemble ensemble;
  const double priors[5] = {0.1, 0.2, 0.9, 0.4, 0.5};
  for (int c = 0; c < 5; ++c) {
    MlpModel m;
    m.trainable = false;
    m.prior = priors[c];
    ensemble.models.push_back(m);
  }
  Scene scene;
  scene.push_back(right_triangle());
  scene.push_back(right_triangle().translated({60, 0}));
  const GraspAction a{Pose2::make(30, 10, 0)};

  const auto [count2, p2] = predict_count(ensemble, scene, {{0, 1}}, a);
  CHECK(count2 == 2);  // classes 0..2 queried; 0.9 wins
  CHECK(p2 == doctest::Approx(0.9));

  const auto [count1, p1] = predict_count(ensemble, scene, {{0}}, a);
  CHECK(count1 == 1);  // 0.2 beats 0.1 within classes 0..1
  CHECK(p1 == doctest::Approx(0.2));

  // Ties break toward the larger count.
  for (MlpModel& m : ensemble.models) m.prior = 0.5;
  const auto [tie, ptie] = predict_count(ensemble, scene, {{0, 1}}, a);
  CHECK(tie == 2);
  CHECK(ptie == doctest::Approx(0.5));

  // With one trainable model in range, untrainable ones are skipped.
  MogNetEnsemble mixed = ensemble;
  mixed.models[1] =
      MlpModel::init({kFeatureDim, 4, 1}, 1.0 / 85.0, 3);
  const auto [cm, pm] = predict_count(mixed, scene, {{0, 1}}, a);
  CHECK(cm == 1);
  (void)pm;
}

TEST_CASE("dataset collection: labels valid, deterministic, multi-grasps occur") {
  SceneSpec sspec;
  sspec.seed = 900;
  sspec.object_count = 14;
  sspec.region_width = 280.0;
  sspec.region_height = 280.0;
  sspec.clustering = 0.85;
  CollectParams params;
  params.target_samples = 30;
  params.noise.n_mc = 10;
  const FrictionModel f = FrictionModel::from_mu(0.5);

  const Dataset filtered = collect_dataset(
      sspec, 20, f, CollectMode::necessary_conditions, params);
  REQUIRE(!filtered.empty());
  CHECK(filtered.size() == 30);
  int multi = 0;
  for (const Sample& s : filtered) {
    CHECK(s.label >= 0);
    CHECK(s.label <= 4);
    if (s.label >= 2) ++multi;
  }
  CHECK(multi > 0);  // the filtered collector does find multi-object grasps

  const Dataset again = collect_dataset(
      sspec, 20, f, CollectMode::necessary_conditions, params);
  REQUIRE(again.size() == filtered.size());
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    CHECK(again[i].label == filtered[i].label);
    CHECK(again[i].seed == filtered[i].seed);
    CHECK(again[i].step == filtered[i].step);
    CHECK(again[i].features.values == filtered[i].features.values);
  }

  const Dataset random_mode =
      collect_dataset(sspec, 20, f, CollectMode::random, params);
  CHECK(!random_mode.empty());
  for (const Sample& s : random_mode) {
    CHECK(s.label >= 0);
    CHECK(s.label <= 4);
  }
}
