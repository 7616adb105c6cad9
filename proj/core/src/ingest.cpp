#include "lakelet/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "lakelet/classify.hpp"
#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {

std::int64_t ingestion_time(UnixMillis ml_time, UnixMillis da_time) {
  if (ml_time < da_time) {
    fail(ErrorCode::kNegativeInterval,
         "meta log time " + std::to_string(ml_time) + " precedes arrival " + std::to_string(da_time));
  }
  return ml_time - da_time;
}

void IngestReport::add(const IngestEntry& e) {
  entries.push_back(e);
  count = entries.size();
  max_it = std::max(max_it, e.it_millis);
  mean_it += (static_cast<double>(e.it_millis) - mean_it) / static_cast<double>(count);
}

void IngestReport::merge(const IngestReport& other) {
  for (const auto& e : other.entries) add(e);
}

Ingestor::Ingestor(Lake& lake, CostModel cost) : lake_(lake), cost_(cost) {}

IngestEntry Ingestor::ingest(const IngestRecord& record, const Ticket& ticket, const RecordMeta& meta) {
  Clock& clock = lake_.clock();
  FormatClass format;
  if (meta.format) {
    format = *meta.format;
  } else {
    format = classify_format(record.payload);
    clock.charge(cost_.scan(static_cast<double>(std::min<std::size_t>(record.payload.size(), 4096))));
  }

  const EntityId id = lake_.store().put_blob(record.payload, format, ticket);
  clock.charge(cost_.write(static_cast<double>(record.payload.size())));

  TechnicalMeta technical{format, meta.schema_hint, record.payload.size(), checksum64(record.payload)};
  OperationalMeta operational;
  operational.source_kind = record.source_kind;
  operational.source_name = record.source_name;
  operational.creator = ticket.principal;
  operational.da_time = record.da_time;
  clock.charge(cost_.commit_ms);
  const CatalogEntry entry = lake_.catalog().register_entity(id, std::move(technical), std::move(operational),
                                                             BusinessMeta{meta.tags, meta.domain});

  IngestEntry out;
  out.id = id;
  out.da_time = entry.operational.da_time;
  out.ml_time = entry.operational.ml_time;
  out.it_millis = ingestion_time(out.ml_time, out.da_time);
  out.format = format;
  return out;
}

IngestReport Ingestor::ingest_bulk(const std::vector<std::filesystem::path>& paths, const Ticket& ticket,
                                   const BulkOptions& options) {
  lake_.auth().require(ticket, "store/*", Action::kWrite);
  IngestReport report;
  for (const auto& path : paths) {
    const UnixMillis da_time = lake_.clock().now_ms();
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIoFailure, "cannot read " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::kIoFailure, "cannot read " + path.string());

    const std::string source = options.source_name.empty() ? path.filename().string() : options.source_name;
    RecordMeta meta{options.tags, options.domain, std::nullopt, std::nullopt};

    const auto delim = options.split_records ? detect_delimiter(bytes) : std::nullopt;
    if (!delim) {
      report.add(ingest(IngestRecord{std::move(bytes), SourceKind::kBulk, source, da_time}, ticket, meta));
      continue;
    }

    // One entity per data row. Each payload is the row's exact byte slice
    // (terminator included); the header travels as the schema hint.
    std::size_t pos = bytes.find('\n');
    std::string header = bytes.substr(0, pos);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    meta.format = FormatClass::kStructured;
    meta.schema_hint = split_fields(header, *delim);
    while (pos != std::string::npos && pos + 1 < bytes.size()) {
      const std::size_t start = pos + 1;
      pos = bytes.find('\n', start);
      const std::size_t end = pos == std::string::npos ? bytes.size() : pos + 1;
      std::string row = bytes.substr(start, end - start);
      if (text::trim(row).empty()) continue;
      const UnixMillis row_arrival = lake_.clock().now_ms();
      report.add(ingest(IngestRecord{std::move(row), SourceKind::kBulk, source, row_arrival}, ticket, meta));
    }
  }
  return report;
}

IngestReport Ingestor::ingest_events(const std::vector<std::string>& documents, const Ticket& ticket,
                                     const std::string& source_name) {
  lake_.auth().require(ticket, "store/*", Action::kWrite);
  IngestReport report;
  for (const auto& doc : documents) {
    const UnixMillis da_time = lake_.clock().now_ms();
    report.add(ingest(IngestRecord{doc, SourceKind::kEvent, source_name, da_time}, ticket));
  }
  return report;
}

}  // namespace lakelet
