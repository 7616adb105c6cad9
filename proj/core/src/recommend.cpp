#include "lakelet/recommend.hpp"

#include <random>

#include "lakelet/error.hpp"

namespace lakelet {

OutcomeModel make_outcome_model(std::size_t cluster_index, const LinearModel& model) {
  OutcomeModel m;
  m.cluster_index = cluster_index;
  m.weights = model.weights;
  m.bias = model.bias;
  return m;
}

OutcomeModel certify(OutcomeModel model, const FeatureMatrix& holdout, std::span<const int> labels) {
  if (holdout.rows() == 0) fail(ErrorCode::kEmptyHoldout, "no holdout rows");
  if (labels.size() != holdout.rows()) fail(ErrorCode::kDimensionMismatch, "holdout labels do not align");
  const LinearModel linear = model.linear();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < holdout.rows(); ++i) {
    if (linear.predict(holdout.row(i)) == labels[i]) ++correct;
  }
  const std::size_t total = holdout.rows();
  model.holdout_accuracy = static_cast<double>(correct) / static_cast<double>(total);
  // Integer form of accuracy >= 0.90 so the boundary is exact.
  model.certified = correct * 100 >= total * 90;
  return model;
}

MedicationFeature medication_feature(const FeatureMatrix& schema, const std::string& column,
                                     const std::vector<std::string>& candidates) {
  MedicationFeature f;
  f.column = column;
  f.candidates = candidates;
  const std::string prefix = column + "=";
  for (std::size_t j = 0; j < schema.feature_names.size(); ++j) {
    if (schema.feature_names[j].rfind(prefix, 0) == 0) f.all_columns.push_back(j);
  }
  for (const auto& c : candidates) f.candidate_columns.push_back(schema.feature_index(prefix + c));
  return f;
}

Recommendation recommend(std::span<const double> patient, const ClusterModel& clusters,
                         const std::vector<OutcomeModel>& outcome_models, const MedicationFeature& medication,
                         std::size_t patient_row_index) {
  if (patient.size() != clusters.dims) fail(ErrorCode::kDimensionMismatch, "patient width differs from cluster model");
  if (medication.candidates.empty()) fail(ErrorCode::kNoCandidates, "no candidate medications");
  const std::size_t cluster = nearest_centroid(clusters.centroids, patient);
  const OutcomeModel* model = nullptr;
  for (const auto& m : outcome_models) {
    if (m.cluster_index == cluster) model = &m;
  }
  if (model == nullptr || !model->certified) {
    fail(ErrorCode::kModelNotCertified, "cluster " + std::to_string(cluster) + " has no certified outcome model");
  }
  const LinearModel linear = model->linear();
  std::vector<double> probe(patient.begin(), patient.end());
  Recommendation best;
  best.patient_row_index = patient_row_index;
  best.cluster_index = cluster;
  for (std::size_t c = 0; c < medication.candidates.size(); ++c) {
    for (std::size_t j : medication.all_columns) probe[j] = 0.0;
    if (medication.candidate_columns[c]) probe[*medication.candidate_columns[c]] = 1.0;
    const double score = linear.decision(probe);
    if (c == 0 || score > best.score) {
      best.score = score;
      best.recommended_medication = medication.candidates[c];
    }
  }
  return best;
}

std::vector<OutcomeModel> train_outcome_models(const FeatureMatrix& features, std::span<const int> labels,
                                               const ClusterModel& clusters, const OutcomeTrainingOptions& options) {
  if (labels.size() != features.rows() || clusters.assignments.size() != features.rows()) {
    fail(ErrorCode::kDimensionMismatch, "features, labels and assignments must align");
  }
  std::vector<OutcomeModel> out;
  for (std::size_t c = 0; c < clusters.k; ++c) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < features.rows(); ++i) {
      if (clusters.assignments[i] == c) rows.push_back(i);
    }
    std::mt19937_64 rng(mix_seed(options.split_seed + c));
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng() % i]);
    const std::size_t holdout_n = static_cast<std::size_t>(static_cast<double>(rows.size()) * options.holdout_fraction);
    const std::span<const std::size_t> all(rows);
    const auto holdout_rows = all.first(holdout_n);
    const auto train_rows = all.subspan(holdout_n);

    std::vector<int> train_labels, holdout_labels;
    for (std::size_t i : train_rows) train_labels.push_back(labels[i]);
    for (std::size_t i : holdout_rows) holdout_labels.push_back(labels[i]);

    OutcomeModel model;
    model.cluster_index = c;
    model.weights.assign(features.dims(), 0.0);
    try {
      SvmOptions svm = options.svm;
      svm.seed = mix_seed(options.svm.seed + c);
      const LinearModel fit = train_svm(features.select_rows(train_rows), train_labels, svm);
      model = make_outcome_model(c, fit);
      if (!holdout_rows.empty()) model = certify(model, features.select_rows(holdout_rows), holdout_labels);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingleClass && e.code() != ErrorCode::kEmptyTable) throw;
    }
    out.push_back(std::move(model));
  }
  return out;
}

}  // namespace lakelet
