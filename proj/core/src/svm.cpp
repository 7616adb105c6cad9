#include "lakelet/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lakelet/error.hpp"
#include "lakelet/kmeans.hpp"

namespace lakelet {
namespace {

void check_problem(const FeatureMatrix& x, std::span<const int> labels) {
  if (labels.size() != x.rows()) fail(ErrorCode::kDimensionMismatch, "label count differs from row count");
  for (int y : labels) {
    if (y != 1 && y != -1) fail(ErrorCode::kInvalidArgument, "labels must be +1 or -1");
  }
}

}  // namespace

double LinearModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) fail(ErrorCode::kDimensionMismatch, "feature width differs from model width");
  double s = bias;
  for (std::size_t j = 0; j < x.size(); ++j) s += weights[j] * x[j];
  return s;
}

double svm_objective(const LinearModel& model, const FeatureMatrix& x, std::span<const int> labels, double lambda) {
  check_problem(x, labels);
  double reg = model.bias * model.bias;
  for (double w : model.weights) reg += w * w;
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) hinge += std::max(0.0, 1.0 - labels[i] * model.decision(x.row(i)));
  return 0.5 * lambda * reg + hinge / static_cast<double>(x.rows());
}

LinearModel svm_subgradient(const LinearModel& model, const FeatureMatrix& x, std::span<const int> labels,
                            double lambda) {
  check_problem(x, labels);
  LinearModel g;
  g.weights.resize(model.weights.size());
  for (std::size_t j = 0; j < g.weights.size(); ++j) g.weights[j] = lambda * model.weights[j];
  g.bias = lambda * model.bias;
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (labels[i] * model.decision(x.row(i)) >= 1.0) continue;
    const auto row = x.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) g.weights[j] -= inv_n * labels[i] * row[j];
    g.bias -= inv_n * labels[i];
  }
  return g;
}

LinearModel train_svm(const FeatureMatrix& x, std::span<const int> labels, const SvmOptions& options,
                      std::vector<double>* objective_per_epoch) {
  check_problem(x, labels);
  if (!(options.lambda > 0.0)) fail(ErrorCode::kInvalidArgument, "lambda must be positive");
  if (x.rows() == 0) fail(ErrorCode::kEmptyTable, "no training rows");
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  if (!has_pos || !has_neg) fail(ErrorCode::kSingleClass, "training labels contain a single class");

  const std::size_t n = x.rows(), d = x.dims();
  const double lambda = options.lambda;
  const double radius = 1.0 / std::sqrt(lambda);
  std::mt19937_64 rng(mix_seed(options.seed));

  LinearModel w{std::vector<double>(d, 0.0), 0.0};
  LinearModel best = w;
  double best_obj = svm_objective(w, x, labels, lambda);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < std::max<std::size_t>(1, options.epochs); ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto row = x.row(idx);
      const int y = labels[idx];
      const double margin = y * w.decision(row);
      const double shrink = 1.0 - eta * lambda;
      for (double& v : w.weights) v *= shrink;
      w.bias *= shrink;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < d; ++j) w.weights[j] += eta * y * row[j];
        w.bias += eta * y;
      }
      double norm2 = w.bias * w.bias;
      for (double v : w.weights) norm2 += v * v;
      if (norm2 > radius * radius) {
        const double s = radius / std::sqrt(norm2);
        for (double& v : w.weights) v *= s;
        w.bias *= s;
      }
    }
    const double obj = svm_objective(w, x, labels, lambda);
    if (objective_per_epoch) objective_per_epoch->push_back(obj);
    if (obj < best_obj) {
      best_obj = obj;
      best = w;
    }
  }
  return best;
}

}  // namespace lakelet
