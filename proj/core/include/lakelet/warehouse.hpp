#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lakelet/clock.hpp"
#include "lakelet/cost_model.hpp"
#include "lakelet/features.hpp"
#include "lakelet/ingest.hpp"
#include "lakelet/types.hpp"

namespace lakelet {

enum class ColumnType { kInteger, kReal, kCategorical };

struct WarehouseColumn {
  std::string name;
  ColumnType type = ColumnType::kReal;
  std::vector<std::string> categories;  // bounded domain for categoricals
};

// Fixed relational schema. With strict set, a record missing any column is
// rejected; otherwise missing columns load as NULL.
struct WarehouseSchema {
  std::vector<WarehouseColumn> columns;
  bool strict = true;

  std::optional<std::size_t> column_index(std::string_view name) const;
};

// Line-delimited `column<TAB>type[<TAB>categories]`, type one of integer,
// real, categorical; categories comma-separated. A `strict<TAB>false` line
// relaxes the schema.
WarehouseSchema parse_schema(std::string_view text);
WarehouseSchema load_schema(const std::filesystem::path& file);
std::string format_schema(const WarehouseSchema& schema);

using WarehouseValue = std::variant<std::monostate, std::int64_t, double, std::string>;
using WarehouseRow = std::vector<WarehouseValue>;

std::optional<std::string> render_value(const WarehouseValue& v);

// Flattens a JSON object into dotted leaf paths (arrays index as `.0`).
// Null leaves are omitted. Returns std::nullopt if the text is not a JSON object.
std::optional<std::vector<std::pair<std::string, std::string>>> flatten_document(std::string_view json_text,
                                                                                 std::size_t* nodes_visited = nullptr);

struct EtlResult {
  std::optional<WarehouseRow> row;
  std::string rejection;
  std::vector<std::string> dropped_fields;
  double etl_millis = 0.0;
  FormatClass format = FormatClass::kUnstructured;

  bool accepted() const { return row.has_value(); }
};

// Parse, type-coerce and validate one record against the schema. Work is
// charged to `clock` through `cost` as it is performed.
EtlResult etl_transform(const IngestRecord& record, const WarehouseSchema& schema, Clock& clock,
                        const CostModel& cost = {});

struct EtlOutcome {
  std::size_t accepted_rows = 0;
  std::size_t rejected_rows = 0;
  std::vector<std::vector<std::string>> dropped_fields;  // per input record
  std::vector<double> etl_millis;                         // per input record
};

struct DwLoadResult {
  EtlOutcome outcome;
  IngestReport report;  // accepted records only; ml_time stamped after ETL and load
  std::vector<WarehouseRow> rows;
  std::vector<std::size_t> accepted_input_index;
  std::vector<FormatClass> input_format;
};

// Schema-on-write loader. Accepted rows append to `warehouse.tsv`, their
// load-log entries to `dw_meta.log`; rejections go to `dw_rejects.log`.
class Warehouse {
 public:
  Warehouse(std::filesystem::path root, WarehouseSchema schema, Clock& clock, CostModel cost = {});

  // Stamps each record's arrival when the loader picks it up, then runs
  // ETL, writes the row and commits the meta log entry.
  DwLoadResult dw_load(const std::vector<IngestRecord>& records);

  const WarehouseSchema& schema() const { return schema_; }

 private:
  std::filesystem::path root_;
  WarehouseSchema schema_;
  Clock& clock_;
  CostModel cost_;
  std::ofstream table_;
  std::ofstream meta_;
  std::ofstream rejects_;
  std::uint64_t next_row_ = 1;
};

// Encodes accepted rows over the surviving schema columns (minus `exclude`);
// `key_column` supplies the row keys.
FeatureMatrix dw_feature_view(const std::vector<WarehouseRow>& rows, const WarehouseSchema& schema,
                              const std::vector<std::string>& exclude, const std::string& key_column);

RawTable warehouse_table(const std::vector<WarehouseRow>& rows, const WarehouseSchema& schema,
                         const std::vector<std::string>& exclude, const std::string& key_column);

}  // namespace lakelet
