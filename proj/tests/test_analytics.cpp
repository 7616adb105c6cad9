#include <gtest/gtest.h>

#include <sstream>

#include "lakelet/features.hpp"
#include "lakelet/kmeans.hpp"
#include "lakelet/model_io.hpp"
#include "lakelet/recommend.hpp"
#include "lakelet/svm.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace lakelet {
namespace {

using testing::error_of;

std::vector<std::vector<double>> random_points(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(d));
  for (auto& p : pts) {
    for (auto& v : p) v = g(rng);
  }
  return pts;
}

TEST(Distance, MatchesSumOfSquares) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t d = 1 + rng() % 100;
    const auto pts = random_points(rng, 2, d);
    const double got = euclidean_distance(pts[0], pts[1]);
    const double want = oracle::distance(pts[0], pts[1]);
    EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, want));
  }
  EXPECT_EQ(error_of([] {
              const std::vector<double> a{1, 2}, b{1};
              euclidean_distance(a, b);
            }),
            ErrorCode::kDimensionMismatch);
}

TEST(Distance, MetricAxioms) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_points(rng, 3, 1 + rng() % 20);
    const double xy = euclidean_distance(p[0], p[1]), yx = euclidean_distance(p[1], p[0]);
    EXPECT_GE(xy, 0.0);
    EXPECT_NEAR(xy, yx, 1e-9);
    EXPECT_NEAR(euclidean_distance(p[0], p[0]), 0.0, 1e-9);
    EXPECT_LE(xy, euclidean_distance(p[0], p[2]) + euclidean_distance(p[2], p[1]) + 1e-9);
  }
}

TEST(Normalize, ScalesImputesAndEncodes) {
  RawTable t;
  t.columns = {{"age", ColumnKind::kNumeric}, {"sex", ColumnKind::kCategorical}, {"flat", ColumnKind::kNumeric}};
  t.rows = {{"20", "F", "1"}, {"40", "M", "1"}, {std::nullopt, "F", "1"}, {"60", std::nullopt, "1"}};
  t.row_keys = {"a", "b", "c", "d"};
  const auto m = normalize(t);
  EXPECT_EQ(m.feature_names, (std::vector<std::string>{"age", "sex=F", "sex=M", "sex=missing"}));
  EXPECT_DOUBLE_EQ(m.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(m.at(2, 0), 0.5);  // median 40
  EXPECT_DOUBLE_EQ(m.at(3, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.at(3, 3), 1.0);
  EXPECT_EQ(m.row_keys, t.row_keys);
  const auto enc = m.encode({"30", "M", "1"});
  EXPECT_DOUBLE_EQ(enc[0], 0.25);
  EXPECT_DOUBLE_EQ(enc[2], 1.0);

  RawTable constant;
  constant.columns = {{"x", ColumnKind::kNumeric}};
  constant.rows = {{"1"}, {"1"}};
  EXPECT_EQ(error_of([&] { normalize(constant); }), ErrorCode::kAllConstant);
  constant.rows = {{"1"}};
  EXPECT_EQ(error_of([&] { normalize(constant); }), ErrorCode::kEmptyTable);
}

TEST(KMeans, MatchesExhaustiveTwoPartition) {
  std::mt19937_64 rng(3);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 3 + rng() % 6;
    const auto pts = random_points(rng, n, 1 + rng() % 3);
    const auto m = FeatureMatrix::from_rows(pts);
    KMeansOptions opts;
    opts.k = 2;
    opts.seed = inst;
    opts.restarts = 10;
    const auto model = kmeans(m, opts);
    EXPECT_NEAR(model.inertia, oracle::exhaustive_two_means(pts), 1e-9) << "instance " << inst;
  }
}

TEST(KMeans, InertiaNeverIncreases) {
  std::mt19937_64 rng(4);
  for (int inst = 0; inst < 30; ++inst) {
    const auto m = FeatureMatrix::from_rows(random_points(rng, 60, 4));
    KMeansOptions opts;
    opts.k = 5;
    opts.seed = inst;
    const auto model = kmeans(m, opts);
    for (std::size_t i = 1; i < model.inertia_history.size(); ++i) {
      EXPECT_LE(model.inertia_history[i], model.inertia_history[i - 1] + 1e-12);
    }
    EXPECT_NEAR(model.inertia, inertia_of(m, model.centroids, model.assignments), 1e-9);
  }
}

TEST(KMeans, DeterministicForSeed) {
  std::mt19937_64 rng(5);
  const auto m = FeatureMatrix::from_rows(random_points(rng, 80, 3));
  KMeansOptions opts;
  opts.k = 4;
  opts.seed = 17;
  EXPECT_EQ(kmeans(m, opts).assignments, kmeans(m, opts).assignments);
  opts.k = 81;
  EXPECT_EQ(error_of([&] { kmeans(m, opts); }), ErrorCode::kKTooLarge);
}

TEST(KMeans, SeparatedBlobsRecovered) {
  std::vector<std::vector<double>> pts;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 0.1);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 20; ++i) pts.push_back({c * 10.0 + g(rng), g(rng)});
  }
  KMeansOptions opts;
  opts.k = 3;
  const auto model = kmeans(FeatureMatrix::from_rows(pts), opts);
  for (int c = 0; c < 3; ++c) {
    for (int i = 1; i < 20; ++i) EXPECT_EQ(model.assignments[c * 20 + i], model.assignments[c * 20]);
  }
}

TEST(Precision, MatchesPairwiseOracle) {
  std::mt19937_64 rng(7);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t k = 2 + rng() % 5;
    const auto pts = random_points(rng, 40 + rng() % 40, 1 + rng() % 10);
    std::vector<std::size_t> assign(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) assign[i] = i < 2 * k ? i / 2 : rng() % k;
    const auto report = cluster_precision(assign, k, FeatureMatrix::from_rows(pts), 4);
    ASSERT_EQ(report.clusters.size(), std::min<std::size_t>(4, k));
    std::size_t prev = SIZE_MAX;
    for (const auto& c : report.clusters) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < assign.size(); ++i) {
        if (assign[i] == c.cluster_index) members.push_back(i);
      }
      EXPECT_EQ(c.member_count, members.size());
      EXPECT_LE(c.member_count, prev);
      prev = c.member_count;
      EXPECT_NEAR(c.d_value, oracle::cluster_d(pts, members), 1e-12);
    }
  }
}

TEST(Precision, SingletonClusterRejected) {
  const auto m = FeatureMatrix::from_rows({{0.0}, {1.0}, {2.0}});
  const std::vector<std::size_t> a{0, 0, 1};
  EXPECT_EQ(error_of([&] { cluster_precision(a, 2, m, 4); }), ErrorCode::kClusterTooSmall);
  EXPECT_NO_THROW(cluster_precision(a, 2, m, 1));
}

TEST(Svm, SubgradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  int checked = 0;
  while (checked < 20) {
    const std::size_t n = 5 + rng() % 10, d = 1 + rng() % 5;
    const auto pts = random_points(rng, n, d);
    std::vector<int> y(n);
    for (auto& v : y) v = rng() % 2 ? 1 : -1;
    const auto x = FeatureMatrix::from_rows(pts);
    LinearModel w{std::vector<double>(d), g(rng)};
    for (auto& v : w.weights) v = g(rng);
    bool near_kink = false;
    for (std::size_t i = 0; i < n; ++i) near_kink = near_kink || std::abs(1.0 - y[i] * w.decision(x.row(i))) < 1e-3;
    if (near_kink) continue;
    const double lambda = 0.1;
    const auto grad = svm_subgradient(w, x, y, lambda);
    const double h = 1e-6;
    auto check = [&](double& param, double analytic) {
      const double keep = param;
      param = keep + h;
      const double up = svm_objective(w, x, y, lambda);
      param = keep - h;
      const double down = svm_objective(w, x, y, lambda);
      param = keep;
      const double numeric = (up - down) / (2 * h);
      EXPECT_NEAR(analytic, numeric, 1e-4 * std::max(1.0, std::abs(numeric)));
    };
    for (std::size_t j = 0; j < d; ++j) check(w.weights[j], grad.weights[j]);
    check(w.bias, grad.bias);
    ++checked;
  }
}

TEST(Svm, SeparatesToySetAndCertifies) {
  const auto train = oracle::separable_toy_set(1);
  const auto hold = oracle::separable_toy_set(2);
  const auto x = FeatureMatrix::from_rows(train.x);
  const auto model = train_svm(x, train.y);
  for (std::size_t i = 0; i < train.x.size(); ++i) {
    EXPECT_EQ(model.decision(train.x[i]) >= 0 ? 1 : -1, train.y[i]);  // sign check
  }
  const auto cert = certify(make_outcome_model(0, model), FeatureMatrix::from_rows(hold.x), hold.y);
  EXPECT_GE(cert.holdout_accuracy, 0.9);
  EXPECT_TRUE(cert.certified);

  // Doubling every feature keeps the predicted signs.
  auto doubled = train.x;
  for (auto& p : doubled) {
    for (auto& v : p) v *= 2;
  }
  const auto model2 = train_svm(FeatureMatrix::from_rows(doubled), train.y);
  for (std::size_t i = 0; i < doubled.size(); ++i) EXPECT_EQ(model2.predict(doubled[i]), train.y[i]);
}

TEST(Svm, Errors) {
  const auto x = FeatureMatrix::from_rows({{0.0}, {1.0}});
  const std::vector<int> same{1, 1};
  EXPECT_EQ(error_of([&] { train_svm(x, same); }), ErrorCode::kSingleClass);
  const std::vector<int> bad{1, 0};
  EXPECT_EQ(error_of([&] { train_svm(x, bad); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_of([&] { certify(OutcomeModel{}, FeatureMatrix(0, 1), {}); }), ErrorCode::kEmptyHoldout);
}

TEST(Certify, BoundaryIsInclusive) {
  OutcomeModel m;
  m.weights = {1.0};
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    rows.push_back({1.0});
    labels.push_back(i < 9 ? 1 : -1);
  }
  const auto c = certify(m, FeatureMatrix::from_rows(rows), labels);
  EXPECT_DOUBLE_EQ(c.holdout_accuracy, 0.9);
  EXPECT_TRUE(c.certified);
  labels[8] = -1;
  EXPECT_FALSE(certify(m, FeatureMatrix::from_rows(rows), labels).certified);
}

TEST(Recommend, PicksHighestScoringMedication) {
  FeatureMatrix schema = FeatureMatrix::from_rows({{0, 0, 0, 0.5}});
  schema.feature_names = {"medication=a", "medication=b", "medication=none", "age"};
  ClusterModel clusters;
  clusters.k = 1;
  clusters.dims = 4;
  clusters.centroids = {{0, 0, 0, 0}};
  OutcomeModel om;
  om.weights = {0.2, 0.9, -1.0, 0.1};
  om.certified = true;
  const auto med = medication_feature(schema, "medication", {"a", "b", "c"});
  const std::vector<double> patient{1, 0, 0, 0.5};
  const auto r = recommend(patient, clusters, {om}, med, 3);
  EXPECT_EQ(r.recommended_medication, "b");
  EXPECT_DOUBLE_EQ(r.score, 0.9 + 0.05);
  EXPECT_EQ(r.patient_row_index, 3u);

  om.certified = false;
  EXPECT_EQ(error_of([&] { recommend(patient, clusters, {om}, med); }), ErrorCode::kModelNotCertified);
  EXPECT_EQ(error_of([&] { recommend(patient, clusters, {}, med); }), ErrorCode::kModelNotCertified);
  EXPECT_EQ(error_of([&] { recommend(patient, clusters, {om}, medication_feature(schema, "medication", {})); }),
            ErrorCode::kNoCandidates);
}

TEST(Outcomes, TrainPerCluster) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::size_t> assign;
  for (int c = 0; c < 2; ++c) {
    const auto t = oracle::separable_toy_set(10 + c, 60);
    for (std::size_t i = 0; i < t.x.size(); ++i) {
      rows.push_back({t.x[i][0], t.x[i][1], static_cast<double>(c) * 10});
      labels.push_back(t.y[i]);
      assign.push_back(c);
    }
  }
  ClusterModel clusters;
  clusters.k = 3;  // cluster 2 is empty
  clusters.dims = 3;
  clusters.assignments = assign;
  const auto models = train_outcome_models(FeatureMatrix::from_rows(rows), labels, clusters);
  ASSERT_EQ(models.size(), 3u);
  EXPECT_TRUE(models[0].certified);
  EXPECT_TRUE(models[1].certified);
  EXPECT_FALSE(models[2].certified);
}

TEST(ModelIo, RoundTrip) {
  ModelBundle b;
  b.clusters.k = 2;
  b.clusters.dims = 2;
  b.clusters.seed = 9;
  b.clusters.centroids = {{0.1, 0.2}, {1.0 / 3.0, 2.0}};
  b.clusters.inertia = 1.25;
  b.feature_names = {"x", "y=a b"};
  OutcomeModel om;
  om.cluster_index = 1;
  om.weights = {0.5, -0.25};
  om.bias = 0.1;
  om.holdout_accuracy = 0.95;
  om.certified = true;
  b.outcomes = {om};
  std::stringstream ss;
  write_model(ss, b);
  const auto back = read_model(ss);
  EXPECT_EQ(back.clusters.centroids, b.clusters.centroids);
  EXPECT_EQ(back.feature_names, b.feature_names);
  ASSERT_EQ(back.outcomes.size(), 1u);
  EXPECT_EQ(back.outcomes[0].weights, om.weights);
  EXPECT_EQ(back.outcomes[0].certified, true);
  std::stringstream junk("garbage\n");
  EXPECT_EQ(error_of([&] { read_model(junk); }), ErrorCode::kParseError);
}

}  // namespace
}  // namespace lakelet
