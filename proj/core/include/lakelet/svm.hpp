#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lakelet/features.hpp"

namespace lakelet {

struct SvmOptions {
  double lambda = 1e-3;
  std::size_t epochs = 50;
  std::uint64_t seed = 42;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double decision(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return decision(x) >= 0.0 ? 1 : -1; }
};

// Soft-margin linear SVM objective with the bias treated as the weight of a
// constant feature:
//   lambda/2 * (|w|^2 + b^2) + mean_i max(0, 1 - y_i (w.x_i + b)).
double svm_objective(const LinearModel& model, const FeatureMatrix& x, std::span<const int> labels, double lambda);

// A sub-gradient of svm_objective (the hinge term contributes only where the
// margin is strictly below 1).
LinearModel svm_subgradient(const LinearModel& model, const FeatureMatrix& x, std::span<const int> labels,
                            double lambda);

// Pegasos-style stochastic sub-gradient descent with step 1/(lambda t), one
// seeded shuffled pass per epoch, and projection onto the 1/sqrt(lambda)
// ball. The iterate with the lowest end-of-epoch objective is returned.
// Labels must be +1 or -1 and both classes must be present.
LinearModel train_svm(const FeatureMatrix& x, std::span<const int> labels, const SvmOptions& options = {},
                      std::vector<double>* objective_per_epoch = nullptr);

}  // namespace lakelet
