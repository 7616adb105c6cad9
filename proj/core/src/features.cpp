#include "lakelet/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {
namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::optional<double> numeric_cell(const std::optional<std::string>& cell) {
  if (!cell) return std::nullopt;
  return text::parse_double(*cell);
}

}  // namespace

std::optional<std::size_t> RawTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t dims) : rows_(rows), dims_(dims), data_(rows * dims, 0.0) {}

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t dims = rows.empty() ? 0 : rows.front().size();
  FeatureMatrix m(rows.size(), dims);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dims) fail(ErrorCode::kDimensionMismatch, "ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  for (std::size_t j = 0; j < dims; ++j) m.feature_names.push_back("x" + std::to_string(j));
  return m;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), dims_);
  out.feature_names = feature_names;
  out.normalization = normalization;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) fail(ErrorCode::kInvalidArgument, "row index out of range");
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
    if (!row_keys.empty()) out.row_keys.push_back(row_keys[indices[i]]);
  }
  return out;
}

std::optional<std::size_t> FeatureMatrix::feature_index(const std::string& name) const {
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    if (feature_names[j] == name) return j;
  }
  return std::nullopt;
}

std::vector<double> FeatureMatrix::encode(const RawRow& raw) const {
  std::vector<double> out(dims_, 0.0);
  for (std::size_t j = 0; j < normalization.size() && j < dims_; ++j) {
    const auto& s = normalization[j];
    if (s.source_column >= raw.size()) fail(ErrorCode::kDimensionMismatch, "raw row is too short");
    const auto& cell = raw[s.source_column];
    if (s.kind == ColumnKind::kNumeric) {
      const double v = numeric_cell(cell).value_or(s.median);
      out[j] = (v - s.min) / (s.max - s.min);
    } else {
      const std::string level = cell ? *cell : kMissingCategory;
      out[j] = level == s.category ? 1.0 : 0.0;
    }
  }
  return out;
}

FeatureMatrix normalize(const RawTable& table) {
  const std::size_t n = table.rows.size();
  if (n < 2) fail(ErrorCode::kEmptyTable, "normalization needs at least two rows");
  for (const auto& r : table.rows) {
    if (r.size() != table.columns.size()) fail(ErrorCode::kDimensionMismatch, "row width differs from column count");
  }

  std::vector<std::string> names;
  std::vector<FeatureScaling> scaling;
  std::vector<std::vector<double>> columns;

  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const auto& col = table.columns[c];
    if (col.kind == ColumnKind::kNumeric) {
      std::vector<double> present;
      for (const auto& r : table.rows) {
        if (auto v = numeric_cell(r[c])) present.push_back(*v);
      }
      if (present.empty()) continue;
      const double med = median_of(present);
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) values[i] = numeric_cell(table.rows[i][c]).value_or(med);
      const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
      const double min = *lo, max = *hi;
      if (!(max > min)) continue;
      for (double& v : values) v = (v - min) / (max - min);
      names.push_back(col.name);
      scaling.push_back(FeatureScaling{c, ColumnKind::kNumeric, min, max, med, {}});
      columns.push_back(std::move(values));
    } else {
      std::set<std::string> levels;
      for (const auto& r : table.rows) levels.insert(r[c] ? *r[c] : std::string(kMissingCategory));
      if (levels.size() < 2) continue;
      for (const auto& level : levels) {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
          const auto& cell = table.rows[i][c];
          values[i] = (cell ? *cell : std::string(kMissingCategory)) == level ? 1.0 : 0.0;
        }
        names.push_back(col.name + "=" + level);
        scaling.push_back(FeatureScaling{c, ColumnKind::kCategorical, 0.0, 1.0, 0.0, level});
        columns.push_back(std::move(values));
      }
    }
  }
  if (columns.empty()) fail(ErrorCode::kAllConstant, "every column is constant");

  FeatureMatrix m(n, columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) m.at(i, j) = columns[j][i];
  }
  m.feature_names = std::move(names);
  m.normalization = std::move(scaling);
  m.row_keys = table.row_keys;
  return m;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::kDimensionMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return sum;
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  return std::sqrt(squared_distance(x, y));
}

}  // namespace lakelet
