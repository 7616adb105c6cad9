#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lakelet {

enum class ColumnKind { kNumeric, kCategorical };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
};

using RawRow = std::vector<std::optional<std::string>>;

// Parsed patient records before encoding. A std::nullopt cell is missing.
struct RawTable {
  std::vector<ColumnSchema> columns;
  std::vector<RawRow> rows;
  std::vector<std::string> row_keys;  // optional, e.g. patient number

  std::optional<std::size_t> column_index(const std::string& name) const;
};

inline constexpr const char* kMissingCategory = "missing";

// How one output column was derived from its source column.
struct FeatureScaling {
  std::size_t source_column = 0;
  ColumnKind kind = ColumnKind::kNumeric;
  double min = 0.0;     // numeric
  double max = 1.0;     // numeric
  double median = 0.0;  // numeric imputation value (unscaled)
  std::string category;  // one-hot level
};

// Row-major dense matrix of encoded features.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t dims);

  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t dims() const { return dims_; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dims_, dims_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dims_, dims_}; }
  double& at(std::size_t i, std::size_t j) { return data_[i * dims_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * dims_ + j]; }

  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;
  std::optional<std::size_t> feature_index(const std::string& name) const;

  // Encodes a raw row with the scaling learned by normalize(); the row must
  // follow the same column layout as the table that was normalized.
  std::vector<double> encode(const RawRow& row) const;

  std::vector<std::string> feature_names;
  std::vector<FeatureScaling> normalization;
  std::vector<std::string> row_keys;

 private:
  std::size_t rows_ = 0;
  std::size_t dims_ = 0;
  std::vector<double> data_;
};

// Numeric columns are min-max scaled to [0,1] after imputing missing values
// with the column median; categorical columns are one-hot encoded with an
// explicit "missing" level; constant columns are dropped. One-hot levels
// are emitted in lexicographic order.
FeatureMatrix normalize(const RawTable& table);

// Plain Euclidean distance, summed in index order.
double euclidean_distance(std::span<const double> x, std::span<const double> y);
double squared_distance(std::span<const double> x, std::span<const double> y);

}  // namespace lakelet
