#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lakelet/catalog.hpp"
#include "lakelet/cost_model.hpp"
#include "lakelet/lake.hpp"
#include "lakelet/types.hpp"

namespace lakelet {

// Load-to-catalog latency of one record: ml_time - da_time.
std::int64_t ingestion_time(UnixMillis ml_time, UnixMillis da_time);

struct IngestRecord {
  std::string payload;
  SourceKind source_kind = SourceKind::kBulk;
  std::string source_name;
  UnixMillis da_time = 0;
};

struct IngestEntry {
  EntityId id;
  UnixMillis da_time = 0;
  UnixMillis ml_time = 0;
  std::int64_t it_millis = 0;
  FormatClass format = FormatClass::kUnstructured;
};

struct IngestReport {
  std::vector<IngestEntry> entries;
  std::size_t count = 0;
  double mean_it = 0.0;
  std::int64_t max_it = 0;

  void add(const IngestEntry& e);
  void merge(const IngestReport& other);
};

// Metadata the connector attaches on top of what it derives itself.
struct RecordMeta {
  std::set<std::string> tags;
  std::string domain;
  std::optional<FormatClass> format;  // skip classification when known
  std::optional<std::vector<std::string>> schema_hint;
};

struct BulkOptions {
  bool split_records = false;
  std::string source_name;  // defaults to the file name
  std::set<std::string> tags;
  std::string domain;
};

// Stores payloads verbatim and registers their metadata. One record's
// store-then-register runs to completion before it is reported.
class Ingestor {
 public:
  explicit Ingestor(Lake& lake, CostModel cost = {});

  // Lake path for one record whose da_time is already stamped.
  IngestEntry ingest(const IngestRecord& record, const Ticket& ticket, const RecordMeta& meta = {});

  IngestReport ingest_bulk(const std::vector<std::filesystem::path>& paths, const Ticket& ticket,
                           const BulkOptions& options = {});
  IngestReport ingest_events(const std::vector<std::string>& documents, const Ticket& ticket,
                             const std::string& source_name = "events");

  Lake& lake() { return lake_; }
  const CostModel& cost() const { return cost_; }

 private:
  Lake& lake_;
  CostModel cost_;
};

}  // namespace lakelet
