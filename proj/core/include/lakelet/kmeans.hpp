#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lakelet/features.hpp"

namespace lakelet {

struct KMeansOptions {
  std::size_t k = 8;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  std::size_t max_iter = 300;
  // Independent k-means++ starts; the lowest-inertia run wins (ties: first).
  std::size_t restarts = 1;
};

struct ClusterModel {
  std::size_t k = 0;
  std::size_t dims = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignments;
  double inertia = 0.0;
  std::uint64_t seed = 0;
  std::size_t iterations_run = 0;
  // Inertia after each Lloyd iteration of the winning run, final pass last.
  std::vector<double> inertia_history;

  std::vector<std::size_t> cluster_sizes() const;
};

// Lloyd's algorithm from seeded k-means++ starts. An empty cluster is
// reseeded with the point farthest from its own centroid. Each run ends with
// Hartigan single-point refinement. Final assignments
// point at the nearest centroid, ties to the lowest index.
ClusterModel kmeans(const FeatureMatrix& m, const KMeansOptions& options);

std::size_t nearest_centroid(const std::vector<std::vector<double>>& centroids, std::span<const double> point);

double inertia_of(const FeatureMatrix& m, const std::vector<std::vector<double>>& centroids,
                  std::span<const std::size_t> assignments);

struct ClusterPrecision {
  std::size_t cluster_index = 0;
  std::size_t member_count = 0;
  double d_value = 0.0;
};

// Largest clusters first (ties: lower index).
struct PrecisionReport {
  std::vector<ClusterPrecision> clusters;
};

// For each of the `top` largest clusters: mean pairwise Euclidean distance
// between members in `eval_space`, divided by sqrt(eval_space.dims()).
PrecisionReport cluster_precision(std::span<const std::size_t> assignments, std::size_t k,
                                  const FeatureMatrix& eval_space, std::size_t top = 4);
PrecisionReport cluster_precision(const ClusterModel& model, const FeatureMatrix& eval_space, std::size_t top = 4);

// splitmix64 step, used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);

// Uniform double in [0,1) from 53 random bits.
double unit_uniform(std::uint64_t bits);

}  // namespace lakelet
