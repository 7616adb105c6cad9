#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lakelet/audit.hpp"
#include "lakelet/clock.hpp"
#include "lakelet/store.hpp"
#include "lakelet/types.hpp"

namespace lakelet {

struct TechnicalMeta {
  FormatClass format = FormatClass::kUnstructured;
  std::optional<std::vector<std::string>> schema_hint;
  std::uint64_t size_bytes = 0;
  std::uint64_t checksum = 0;

  bool operator==(const TechnicalMeta&) const = default;
};

struct OperationalMeta {
  SourceKind source_kind = SourceKind::kBulk;
  std::string source_name;
  std::string creator;
  UnixMillis da_time = 0;  // arrival
  UnixMillis ml_time = 0;  // catalog commit; assigned by the catalog
  std::uint64_t access_history_count = 0;

  bool operator==(const OperationalMeta&) const = default;
};

struct BusinessMeta {
  std::set<std::string> tags;
  std::string domain;

  bool operator==(const BusinessMeta&) const = default;
};

struct CatalogEntry {
  EntityId entity;
  TechnicalMeta technical;
  OperationalMeta operational;
  BusinessMeta business;

  bool operator==(const CatalogEntry&) const = default;
};

// Conjunctive query; unset clauses match everything. Time bounds apply to
// ml_time as [since, until).
struct CatalogQuery {
  std::optional<FormatClass> format;
  std::optional<SourceKind> source_kind;
  std::set<std::string> tags;
  std::optional<std::string> creator;
  std::optional<std::string> source_name;
  std::optional<UnixMillis> since;
  std::optional<UnixMillis> until;

  bool matches(const CatalogEntry& e) const;
};

struct LineageEdge {
  EntityId child;
  std::vector<EntityId> parents;
  std::string transform;
};

struct Ancestor {
  EntityId id;
  std::string transform;

  bool operator==(const Ancestor&) const = default;
};

// 64-bit FNV-1a over the payload bytes.
std::uint64_t checksum64(std::string_view bytes);

// Extended-metadata registry backed by append-only `catalog.log` and
// `lineage.log`. The audit log lives alongside as `audit.log`.
class Catalog {
 public:
  Catalog(const std::filesystem::path& root, const Store& store, Clock& clock, AuditLog& audit);

  Catalog(const Catalog&) = delete;
  Catalog& operator=(const Catalog&) = delete;

  // operational.ml_time is ignored and set from the clock at commit.
  CatalogEntry register_entity(const EntityId& id, TechnicalMeta technical, OperationalMeta operational,
                               BusinessMeta business);

  std::optional<CatalogEntry> find(const EntityId& id) const;
  std::vector<CatalogEntry> search(const CatalogQuery& query) const;
  std::vector<CatalogEntry> all() const;
  std::size_t size() const;

  void record_lineage(const LineageEdge& edge);
  // Transitive ancestry in breadth-first order; each ancestor carries the
  // transform label of the edge through which it was first reached.
  std::vector<Ancestor> lineage_of(const EntityId& id) const;

  void note_access(const EntityId& id);

  void append_audit(AuditEvent event) { audit_.append(std::move(event)); }
  std::vector<AuditEvent> query_audit(const AuditFilter& filter = {}) const { return audit_.query(filter); }
  AuditLog& audit() { return audit_; }

 private:
  void apply_register(CatalogEntry entry);
  void persist(std::ofstream& out, const std::string& line);
  bool reaches(const EntityId& from, const EntityId& target) const;

  const Store& store_;
  Clock& clock_;
  AuditLog& audit_;

  mutable std::shared_mutex mu_;
  std::vector<CatalogEntry> entries_;  // commit order == ml_time order
  std::unordered_map<EntityId, std::size_t> index_;
  // child -> (parent, transform) in insertion order
  std::unordered_map<EntityId, std::vector<std::pair<EntityId, std::string>>> parents_;
  std::ofstream catalog_out_;
  std::ofstream lineage_out_;
};

}  // namespace lakelet
