#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lakelet/features.hpp"
#include "lakelet/kmeans.hpp"
#include "lakelet/svm.hpp"

namespace lakelet {

inline constexpr double kCertificationAccuracy = 0.90;

struct OutcomeModel {
  std::size_t cluster_index = 0;
  std::vector<double> weights;
  double bias = 0.0;
  double holdout_accuracy = 0.0;
  bool certified = false;

  LinearModel linear() const { return LinearModel{weights, bias}; }
};

OutcomeModel make_outcome_model(std::size_t cluster_index, const LinearModel& model);

// Scores the holdout and sets certified = (accuracy >= 0.90).
OutcomeModel certify(OutcomeModel model, const FeatureMatrix& holdout, std::span<const int> labels);

// The one-hot columns of a categorical medication feature, one entry per
// candidate value (std::nullopt when the level has no column).
struct MedicationFeature {
  std::string column;
  std::vector<std::string> candidates;
  std::vector<std::optional<std::size_t>> candidate_columns;
  std::vector<std::size_t> all_columns;
};

MedicationFeature medication_feature(const FeatureMatrix& schema, const std::string& column,
                                     const std::vector<std::string>& candidates);

struct Recommendation {
  std::size_t patient_row_index = 0;
  std::size_t cluster_index = 0;
  std::string recommended_medication;
  double score = 0.0;
};

// Assigns the patient to the nearest centroid, substitutes each candidate's
// indicator into the medication columns and returns the candidate with the
// largest positive-outcome margin (ties: first declared).
Recommendation recommend(std::span<const double> patient, const ClusterModel& clusters,
                         const std::vector<OutcomeModel>& outcome_models, const MedicationFeature& medication,
                         std::size_t patient_row_index = 0);

struct OutcomeTrainingOptions {
  SvmOptions svm;
  double holdout_fraction = 0.2;
  std::uint64_t split_seed = 7;
};

// Per-cluster training: each cluster's rows are split (seeded) into training
// and disjoint holdout rows, a linear SVM is fit and then certified. Clusters
// with a single outcome class, or with no holdout rows, get an uncertified
// model with zero weights.
std::vector<OutcomeModel> train_outcome_models(const FeatureMatrix& features, std::span<const int> labels,
                                               const ClusterModel& clusters, const OutcomeTrainingOptions& options = {});

}  // namespace lakelet
