#include "lakelet/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lakelet/error.hpp"

namespace lakelet {
namespace {

std::vector<std::vector<double>> plus_plus_init(const FeatureMatrix& m, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = m.rows();
  std::vector<std::vector<double>> centroids;
  const std::size_t first = static_cast<std::size_t>(rng() % n);
  centroids.emplace_back(m.row(first).begin(), m.row(first).end());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(m.row(i), centroids.back()));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = unit_uniform(rng()) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng() % n);
    }
    centroids.emplace_back(m.row(pick).begin(), m.row(pick).end());
  }
  return centroids;
}

void assign_all(const FeatureMatrix& m, const std::vector<std::vector<double>>& centroids,
                std::vector<std::size_t>& assignments) {
  for (std::size_t i = 0; i < m.rows(); ++i) assignments[i] = nearest_centroid(centroids, m.row(i));
}

std::vector<std::size_t> recompute_means(const FeatureMatrix& m, ClusterModel& model) {
  const std::size_t d = m.dims();
  std::vector<std::size_t> counts(model.k, 0);
  std::vector<std::vector<double>> sums(model.k, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto x = m.row(i);
    ++counts[model.assignments[i]];
    for (std::size_t j = 0; j < d; ++j) sums[model.assignments[i]][j] += x[j];
  }
  for (std::size_t c = 0; c < model.k; ++c) {
    if (counts[c] == 0) continue;
    for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
    model.centroids[c] = std::move(sums[c]);
  }
  return counts;
}

// Hartigan single-point moves: Lloyd stops at partitions where moving one
// point would still lower inertia once both means are updated.
void refine(const FeatureMatrix& m, ClusterModel& model, std::size_t max_passes) {
  const std::size_t n = m.rows(), d = m.dims();
  auto counts = recompute_means(m, model);
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = model.assignments[i];
      if (counts[a] < 2) continue;
      const auto x = m.row(i);
      const double na = static_cast<double>(counts[a]);
      const double leave = na / (na - 1.0) * squared_distance(x, model.centroids[a]);
      std::size_t best = a;
      double best_gain = 0.0;
      for (std::size_t b = 0; b < model.k; ++b) {
        if (b == a) continue;
        const double nb = static_cast<double>(counts[b]);
        const double gain = leave - nb / (nb + 1.0) * squared_distance(x, model.centroids[b]);
        if (gain > best_gain * (1.0 + 1e-12) + 1e-12) {
          best_gain = gain;
          best = b;
        }
      }
      if (best == a) continue;
      auto& ca = model.centroids[a];
      auto& cb = model.centroids[best];
      const double nb = static_cast<double>(counts[best]);
      for (std::size_t j = 0; j < d; ++j) {
        ca[j] = (ca[j] * na - x[j]) / (na - 1.0);
        cb[j] = (cb[j] * nb + x[j]) / (nb + 1.0);
      }
      --counts[a];
      ++counts[best];
      model.assignments[i] = best;
      moved = true;
    }
    counts = recompute_means(m, model);
    // Keep the nearest-centroid contract: a Lloyd step never raises inertia.
    std::vector<std::size_t> before = model.assignments;
    assign_all(m, model.centroids, model.assignments);
    if (model.assignments != before) {
      counts = recompute_means(m, model);
      moved = true;
    }
    if (!moved) break;
    model.inertia_history.push_back(inertia_of(m, model.centroids, model.assignments));
  }
}

ClusterModel lloyd(const FeatureMatrix& m, const KMeansOptions& options, std::uint64_t run_seed) {
  const std::size_t n = m.rows(), d = m.dims(), k = options.k;
  std::mt19937_64 rng(run_seed);
  ClusterModel model;
  model.k = k;
  model.dims = d;
  model.seed = options.seed;
  model.centroids = plus_plus_init(m, k, rng);
  model.assignments.assign(n, 0);

  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    assign_all(m, model.centroids, model.assignments);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t a : model.assignments) ++counts[a];

    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = model.assignments[i];
        if (counts[a] < 2) continue;
        const double dist = squared_distance(m.row(i), model.centroids[a]);
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      if (far == n) continue;
      --counts[model.assignments[far]];
      model.assignments[far] = c;
      counts[c] = 1;
      model.centroids[c].assign(m.row(far).begin(), m.row(far).end());
    }

    std::vector<std::vector<double>> next(k, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto& acc = next[model.assignments[i]];
      const auto x = m.row(i);
      for (std::size_t j = 0; j < d; ++j) acc[j] += x[j];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        next[c] = model.centroids[c];
        continue;
      }
      for (double& v : next[c]) v /= static_cast<double>(counts[c]);
      shift = std::max(shift, euclidean_distance(next[c], model.centroids[c]));
    }
    model.centroids = std::move(next);
    model.iterations_run = iter + 1;
    model.inertia_history.push_back(inertia_of(m, model.centroids, model.assignments));
    if (shift < options.tol) break;
  }
  assign_all(m, model.centroids, model.assignments);
  refine(m, model, options.max_iter);
  model.inertia = inertia_of(m, model.centroids, model.assignments);
  model.inertia_history.push_back(model.inertia);
  return model;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t a : assignments) ++sizes[a];
  return sizes;
}

std::size_t nearest_centroid(const std::vector<std::vector<double>>& centroids, std::span<const double> point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double dist = squared_distance(point, centroids[c]);
    if (dist < best_d) {
      best_d = dist;
      best = c;
    }
  }
  return best;
}

double inertia_of(const FeatureMatrix& m, const std::vector<std::vector<double>>& centroids,
                  std::span<const std::size_t> assignments) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) total += squared_distance(m.row(i), centroids[assignments[i]]);
  return total;
}

ClusterModel kmeans(const FeatureMatrix& m, const KMeansOptions& options) {
  if (options.k == 0) fail(ErrorCode::kInvalidArgument, "k must be positive");
  if (options.k > m.rows()) {
    fail(ErrorCode::kKTooLarge, "k=" + std::to_string(options.k) + " exceeds " + std::to_string(m.rows()) + " rows");
  }
  if (!(options.tol > 0.0)) fail(ErrorCode::kInvalidArgument, "tol must be positive");
  ClusterModel best;
  const std::size_t runs = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < runs; ++r) {
    ClusterModel candidate = lloyd(m, options, mix_seed(options.seed + r));
    if (r == 0 || candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

PrecisionReport cluster_precision(std::span<const std::size_t> assignments, std::size_t k,
                                  const FeatureMatrix& eval_space, std::size_t top) {
  if (assignments.size() != eval_space.rows()) {
    fail(ErrorCode::kDimensionMismatch, "evaluation rows do not align with assignments");
  }
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] >= k) fail(ErrorCode::kInvalidArgument, "assignment out of range");
    members[assignments[i]].push_back(i);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return members[a].size() > members[b].size(); });

  const double scale = std::sqrt(static_cast<double>(eval_space.dims()));
  PrecisionReport report;
  for (std::size_t r = 0; r < std::min(top, k); ++r) {
    const auto& idx = members[order[r]];
    if (idx.size() < 2) {
      fail(ErrorCode::kClusterTooSmall, "cluster " + std::to_string(order[r]) + " has fewer than 2 members");
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) sum += euclidean_distance(eval_space.row(idx[a]), eval_space.row(idx[b]));
    }
    const double pairs = static_cast<double>(idx.size()) * static_cast<double>(idx.size() - 1) / 2.0;
    report.clusters.push_back(ClusterPrecision{order[r], idx.size(), sum / pairs / scale});
  }
  return report;
}

PrecisionReport cluster_precision(const ClusterModel& model, const FeatureMatrix& eval_space, std::size_t top) {
  return cluster_precision(model.assignments, model.k, eval_space, top);
}

}  // namespace lakelet
