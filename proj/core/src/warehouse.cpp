#include "lakelet/warehouse.hpp"

#include <algorithm>
#include "json.hpp"

#include "lakelet/classify.hpp"
#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {

namespace {

std::string_view type_name(ColumnType t) {
  switch (t) {
    case ColumnType::kInteger: return "integer";
    case ColumnType::kReal: return "real";
    case ColumnType::kCategorical: return "categorical";
  }
  return "real";
}

ColumnType parse_type(std::string_view s) {
  const std::string t = text::to_lower(text::trim(s));
  if (t == "integer" || t == "int") return ColumnType::kInteger;
  if (t == "real" || t == "double" || t == "float") return ColumnType::kReal;
  if (t == "categorical" || t == "category") return ColumnType::kCategorical;
  fail(ErrorCode::kParseError, "unknown column type: " + std::string(s));
}

void flatten_into(const nlohmann::json& node, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out, std::size_t& nodes) {
  ++nodes;
  auto child = [&](const std::string& key) { return prefix.empty() ? key : prefix + "." + key; };
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) flatten_into(it.value(), child(it.key()), out, nodes);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) flatten_into(node[i], child(std::to_string(i)), out, nodes);
  } else if (node.is_string()) {
    out.emplace_back(prefix, node.get<std::string>());
  } else if (node.is_boolean()) {
    out.emplace_back(prefix, node.get<bool>() ? "true" : "false");
  } else if (node.is_number_integer()) {
    out.emplace_back(prefix, node.dump());
  } else if (node.is_number()) {
    out.emplace_back(prefix, text::format_double(node.get<double>()));
  }
}

std::optional<WarehouseValue> coerce(const WarehouseColumn& col, std::string_view raw) {
  const auto v = text::trim(raw);
  switch (col.type) {
    case ColumnType::kInteger:
      if (auto i = text::parse_int(v)) return WarehouseValue{*i};
      return std::nullopt;
    case ColumnType::kReal:
      if (auto d = text::parse_double(v)) return WarehouseValue{*d};
      return std::nullopt;
    case ColumnType::kCategorical:
      if (!col.categories.empty() &&
          std::find(col.categories.begin(), col.categories.end(), v) == col.categories.end()) {
        return std::nullopt;
      }
      return WarehouseValue{std::string(v)};
  }
  return std::nullopt;
}

std::string row_line(const WarehouseRow& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += '\t';
    line += render_value(row[i]).value_or("\\N");
  }
  return line;
}

}  // namespace

std::optional<std::size_t> WarehouseSchema::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

WarehouseSchema parse_schema(std::string_view text_in) {
  WarehouseSchema schema;
  for (auto line : text::split(text_in, '\n')) {
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto parts = text::split(t, '\t');
    if (parts.size() < 2) fail(ErrorCode::kParseError, "schema line needs name and type: " + std::string(t));
    if (parts[0] == "strict") {
      schema.strict = text::to_lower(parts[1]) != "false";
      continue;
    }
    WarehouseColumn col{std::string(text::trim(parts[0])), parse_type(parts[1]), {}};
    if (schema.column_index(col.name)) fail(ErrorCode::kParseError, "duplicate column " + col.name);
    if (parts.size() > 2 && col.type == ColumnType::kCategorical) {
      for (const auto& c : text::split(parts[2], ',')) {
        if (!text::trim(c).empty()) col.categories.emplace_back(text::trim(c));
      }
    }
    schema.columns.push_back(std::move(col));
  }
  if (schema.columns.empty()) fail(ErrorCode::kParseError, "schema has no columns");
  return schema;
}

WarehouseSchema load_schema(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::kIoFailure, "cannot read schema " + file.string());
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_schema(body);
}

std::string format_schema(const WarehouseSchema& schema) {
  std::string out;
  if (!schema.strict) out += "strict\tfalse\n";
  for (const auto& c : schema.columns) {
    out += c.name;
    out += '\t';
    out += type_name(c.type);
    if (!c.categories.empty()) {
      out += '\t';
      out += text::join(c.categories, ",");
    }
    out += '\n';
  }
  return out;
}

std::optional<std::string> render_value(const WarehouseValue& v) {
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<double>(v)) return text::format_double(std::get<double>(v));
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  return std::nullopt;
}

std::optional<std::vector<std::pair<std::string, std::string>>> flatten_document(std::string_view json_text,
                                                                                 std::size_t* nodes_visited) {
  auto doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t nodes = 0;
  flatten_into(doc, "", out, nodes);
  if (nodes_visited) *nodes_visited = nodes;
  return out;
}

EtlResult etl_transform(const IngestRecord& record, const WarehouseSchema& schema, Clock& clock,
                        const CostModel& cost) {
  const std::int64_t start = clock.now_micros();
  EtlResult result;
  result.format = classify_format(record.payload);
  clock.charge(cost.scan(static_cast<double>(record.payload.size())));

  auto finish = [&](std::string rejection) {
    result.rejection = std::move(rejection);
    if (!result.rejection.empty()) result.row.reset();
    result.etl_millis = static_cast<double>(clock.now_micros() - start) / 1000.0;
    return result;
  };

  std::vector<std::pair<std::string, std::string>> fields;
  if (result.format == FormatClass::kStructured) {
    const auto delim = detect_delimiter(record.payload);
    const auto lines = payload_lines(record.payload);
    std::vector<std::string_view> data;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (!text::trim(lines[i]).empty()) data.push_back(lines[i]);
    }
    const auto header = split_fields(lines.front(), *delim);
    if (data.size() != 1) {
      result.dropped_fields = header;
      return finish("expected one data row, found " + std::to_string(data.size()));
    }
    const auto values = split_fields(data.front(), *delim);
    clock.charge(cost.parse_per_field_ms * static_cast<double>(header.size() + values.size()));
    if (values.size() != header.size()) {
      result.dropped_fields = header;
      return finish("row has " + std::to_string(values.size()) + " fields, header has " +
                    std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < header.size(); ++i) fields.emplace_back(header[i], values[i]);
  } else if (result.format == FormatClass::kSemiStructured) {
    std::size_t nodes = 0;
    auto flat = flatten_document(record.payload, &nodes);
    clock.charge(cost.flatten_per_node_ms * static_cast<double>(nodes));
    if (!flat) return finish("document is not a JSON object");
    clock.charge(cost.parse_per_field_ms * static_cast<double>(flat->size()));
    fields = std::move(*flat);
  } else {
    result.dropped_fields = {"note_text"};
    return finish("free text has no relational mapping");
  }

  WarehouseRow row(schema.columns.size());
  std::vector<bool> seen(schema.columns.size(), false);
  std::string rejection;
  for (const auto& [name, raw] : fields) {
    const auto idx = schema.column_index(name);
    if (!idx) {
      result.dropped_fields.push_back(name);
      continue;
    }
    clock.charge(cost.validate_per_field_ms + cost.transform_per_field_ms);
    seen[*idx] = true;
    if (text::trim(raw).empty()) continue;
    auto v = coerce(schema.columns[*idx], raw);
    if (!v) {
      if (rejection.empty()) rejection = "column " + name + " rejects value '" + raw + "'";
      continue;
    }
    row[*idx] = std::move(*v);
  }
  for (std::size_t i = 0; i < schema.columns.size() && rejection.empty(); ++i) {
    if (schema.strict && (!seen[i] || std::holds_alternative<std::monostate>(row[i]))) {
      rejection = "missing column " + schema.columns[i].name;
    }
  }
  if (!rejection.empty()) {
    // Nothing of a rejected record reaches the warehouse.
    result.dropped_fields.clear();
    for (const auto& f : fields) result.dropped_fields.push_back(f.first);
    return finish(std::move(rejection));
  }
  result.row = std::move(row);
  return finish("");
}

Warehouse::Warehouse(std::filesystem::path root, WarehouseSchema schema, Clock& clock, CostModel cost)
    : root_(std::move(root)), schema_(std::move(schema)), clock_(clock), cost_(cost) {
  std::filesystem::create_directories(root_);
  const bool fresh = !std::filesystem::exists(root_ / "warehouse.tsv");
  table_.open(root_ / "warehouse.tsv", std::ios::app);
  meta_.open(root_ / "dw_meta.log", std::ios::app);
  rejects_.open(root_ / "dw_rejects.log", std::ios::app);
  if (!table_ || !meta_ || !rejects_) fail(ErrorCode::kIoFailure, "cannot open warehouse at " + root_.string());
  if (fresh) {
    std::vector<std::string> names;
    for (const auto& c : schema_.columns) names.push_back(c.name);
    table_ << text::join(names, "\t") << '\n';
    table_.flush();
  }
  std::ifstream existing(root_ / "dw_meta.log");
  for (std::string line; std::getline(existing, line);) ++next_row_;
}

DwLoadResult Warehouse::dw_load(const std::vector<IngestRecord>& records) {
  DwLoadResult out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const UnixMillis da_time = clock_.now_ms();
    EtlResult etl = etl_transform(records[i], schema_, clock_, cost_);
    out.input_format.push_back(etl.format);
    out.outcome.dropped_fields.push_back(etl.dropped_fields);
    out.outcome.etl_millis.push_back(etl.etl_millis);
    if (!etl.accepted()) {
      ++out.outcome.rejected_rows;
      rejects_ << text::encode_kv({{"source", records[i].source_name},
                             {"format", std::string(to_string(etl.format))},
                             {"reason", etl.rejection},
                             {"dropped", text::join(etl.dropped_fields, ",")}})
               << '\n';
      rejects_.flush();
      continue;
    }
    const std::string line = row_line(*etl.row);
    table_ << line << '\n';
    table_.flush();
    if (!table_) fail(ErrorCode::kIoFailure, "warehouse table write failed");
    clock_.charge(cost_.write(static_cast<double>(line.size() + 1)));

    clock_.charge(cost_.commit_ms);
    const UnixMillis ml_time = clock_.now_ms();
    meta_ << text::encode_kv({{"row", std::to_string(next_row_++)},
                        {"source", records[i].source_name},
                        {"da_time", std::to_string(da_time)},
                        {"ml_time", std::to_string(ml_time)}})
          << '\n';
    meta_.flush();

    IngestEntry entry;
    entry.da_time = da_time;
    entry.ml_time = ml_time;
    entry.it_millis = ingestion_time(ml_time, da_time);
    entry.format = etl.format;
    out.report.add(entry);
    out.rows.push_back(std::move(*etl.row));
    out.accepted_input_index.push_back(i);
    ++out.outcome.accepted_rows;
  }
  return out;
}

RawTable warehouse_table(const std::vector<WarehouseRow>& rows, const WarehouseSchema& schema,
                         const std::vector<std::string>& exclude, const std::string& key_column) {
  RawTable table;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    const auto& c = schema.columns[i];
    if (std::find(exclude.begin(), exclude.end(), c.name) != exclude.end()) continue;
    keep.push_back(i);
    table.columns.push_back(
        {c.name, c.type == ColumnType::kCategorical ? ColumnKind::kCategorical : ColumnKind::kNumeric});
  }
  const auto key = key_column.empty() ? std::nullopt : schema.column_index(key_column);
  for (const auto& row : rows) {
    if (row.size() != schema.columns.size()) fail(ErrorCode::kDimensionMismatch, "row width differs from schema");
    RawRow raw;
    for (auto i : keep) raw.push_back(render_value(row[i]));
    table.rows.push_back(std::move(raw));
    if (key) table.row_keys.push_back(render_value(row[*key]).value_or(""));
  }
  return table;
}

FeatureMatrix dw_feature_view(const std::vector<WarehouseRow>& rows, const WarehouseSchema& schema,
                              const std::vector<std::string>& exclude, const std::string& key_column) {
  return normalize(warehouse_table(rows, schema, exclude, key_column));
}

}  // namespace lakelet
