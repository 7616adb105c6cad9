#include "lakelet/catalog.hpp"

#include <deque>
#include <mutex>
#include <unordered_set>

#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {
namespace {

std::string join_set(const std::set<std::string>& s) { return text::join({s.begin(), s.end()}, ","); }

std::set<std::string> split_set(const std::string& s) {
  std::set<std::string> out;
  if (s.empty()) return out;
  for (auto& part : text::split(s, ',')) out.insert(std::move(part));
  return out;
}

text::KvRecord to_record(const CatalogEntry& e) {
  text::KvRecord r{{"op", "register"},
                   {"entity", e.entity.str()},
                   {"format", std::string(to_string(e.technical.format))},
                   {"size_bytes", std::to_string(e.technical.size_bytes)},
                   {"checksum", std::to_string(e.technical.checksum)}};
  if (e.technical.schema_hint) r.emplace_back("schema_hint", text::join(*e.technical.schema_hint, ","));
  r.emplace_back("source_kind", std::string(to_string(e.operational.source_kind)));
  r.emplace_back("source_name", e.operational.source_name);
  r.emplace_back("creator", e.operational.creator);
  r.emplace_back("da_time", std::to_string(e.operational.da_time));
  r.emplace_back("ml_time", std::to_string(e.operational.ml_time));
  r.emplace_back("tags", join_set(e.business.tags));
  r.emplace_back("domain", e.business.domain);
  return r;
}

std::optional<CatalogEntry> from_record(const text::KvRecord& r) {
  CatalogEntry e;
  const auto id = EntityId::parse(text::kv_get(r, "entity").value_or(""));
  const auto format = parse_format(text::kv_get(r, "format").value_or(""));
  const auto kind = parse_source_kind(text::kv_get(r, "source_kind").value_or(""));
  const auto size = text::parse_int(text::kv_get(r, "size_bytes").value_or(""));
  const auto da = text::parse_int(text::kv_get(r, "da_time").value_or(""));
  const auto ml = text::parse_int(text::kv_get(r, "ml_time").value_or(""));
  if (!id || !format || !kind || !size || !da || !ml) return std::nullopt;
  e.entity = *id;
  e.technical.format = *format;
  e.technical.size_bytes = static_cast<std::uint64_t>(*size);
  e.technical.checksum = std::stoull(text::kv_get(r, "checksum").value_or("0"));
  if (const auto hint = text::kv_get(r, "schema_hint")) e.technical.schema_hint = text::split(*hint, ',');
  e.operational.source_kind = *kind;
  e.operational.source_name = text::kv_get(r, "source_name").value_or("");
  e.operational.creator = text::kv_get(r, "creator").value_or("");
  e.operational.da_time = *da;
  e.operational.ml_time = *ml;
  e.business.tags = split_set(text::kv_get(r, "tags").value_or(""));
  e.business.domain = text::kv_get(r, "domain").value_or("");
  return e;
}

}  // namespace

std::uint64_t checksum64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool CatalogQuery::matches(const CatalogEntry& e) const {
  if (format && e.technical.format != *format) return false;
  if (source_kind && e.operational.source_kind != *source_kind) return false;
  if (creator && e.operational.creator != *creator) return false;
  if (source_name && e.operational.source_name != *source_name) return false;
  if (since && e.operational.ml_time < *since) return false;
  if (until && e.operational.ml_time >= *until) return false;
  for (const auto& t : tags) {
    if (!e.business.tags.count(t)) return false;
  }
  return true;
}

Catalog::Catalog(const std::filesystem::path& root, const Store& store, Clock& clock, AuditLog& audit)
    : store_(store), clock_(clock), audit_(audit) {
  std::filesystem::create_directories(root);
  const auto catalog_path = root / "catalog.log";
  const auto lineage_path = root / "lineage.log";

  for (const auto& line : text::read_lines(catalog_path.string())) {
    const auto rec = text::decode_kv(line);
    const auto op = text::kv_get(rec, "op");
    if (op == "register") {
      if (auto e = from_record(rec); e && !index_.count(e->entity)) apply_register(std::move(*e));
    } else if (op == "access") {
      const auto id = EntityId::parse(text::kv_get(rec, "entity").value_or(""));
      if (id && index_.count(*id)) ++entries_[index_[*id]].operational.access_history_count;
    }
  }
  for (const auto& line : text::read_lines(lineage_path.string())) {
    const auto rec = text::decode_kv(line);
    const auto child = EntityId::parse(text::kv_get(rec, "child").value_or(""));
    if (!child) continue;
    const std::string transform = text::kv_get(rec, "transform").value_or("");
    for (const auto& p : text::split(text::kv_get(rec, "parents").value_or(""), ',')) {
      if (const auto pid = EntityId::parse(p)) parents_[*child].emplace_back(*pid, transform);
    }
  }

  catalog_out_.open(catalog_path, std::ios::app);
  lineage_out_.open(lineage_path, std::ios::app);
  if (!catalog_out_ || !lineage_out_) fail(ErrorCode::kIoFailure, "cannot open catalog logs under " + root.string());
}

void Catalog::apply_register(CatalogEntry entry) {
  index_.emplace(entry.entity, entries_.size());
  entries_.push_back(std::move(entry));
}

void Catalog::persist(std::ofstream& out, const std::string& line) {
  out << line << '\n';
  out.flush();
  if (!out) fail(ErrorCode::kIoFailure, "catalog append failed");
}

CatalogEntry Catalog::register_entity(const EntityId& id, TechnicalMeta technical, OperationalMeta operational,
                                      BusinessMeta business) {
  const auto stored = store_.info(id);
  if (!stored) fail(ErrorCode::kUnknownEntity, "entity " + id.str() + " is not in the store");
  if (technical.format != stored->format) {
    fail(ErrorCode::kInvalidArgument, "technical format disagrees with the stored entity");
  }
  for (const auto& t : business.tags) {
    if (t.empty() || t.find(',') != std::string::npos) fail(ErrorCode::kInvalidArgument, "invalid tag '" + t + "'");
  }

  std::unique_lock lock(mu_);
  if (index_.count(id)) fail(ErrorCode::kDuplicateEntry, "entity " + id.str() + " already registered");
  operational.ml_time = clock_.now_ms();
  if (operational.ml_time < operational.da_time) {
    fail(ErrorCode::kNegativeInterval, "arrival time is later than the catalog commit");
  }
  operational.access_history_count = 0;
  CatalogEntry entry{id, std::move(technical), std::move(operational), std::move(business)};
  persist(catalog_out_, text::encode_kv(to_record(entry)));
  apply_register(entry);
  return entry;
}

std::optional<CatalogEntry> Catalog::find(const EntityId& id) const {
  std::shared_lock lock(mu_);
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second];
}

std::vector<CatalogEntry> Catalog::search(const CatalogQuery& query) const {
  std::shared_lock lock(mu_);
  std::vector<CatalogEntry> out;
  for (const auto& e : entries_) {
    if (query.matches(e)) out.push_back(e);
  }
  return out;
}

std::vector<CatalogEntry> Catalog::all() const {
  std::shared_lock lock(mu_);
  return entries_;
}

std::size_t Catalog::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

bool Catalog::reaches(const EntityId& from, const EntityId& target) const {
  // Walks parent links upward from `from`.
  std::unordered_set<EntityId> seen{from};
  std::vector<EntityId> stack{from};
  while (!stack.empty()) {
    const EntityId cur = stack.back();
    stack.pop_back();
    if (cur == target) return true;
    const auto it = parents_.find(cur);
    if (it == parents_.end()) continue;
    for (const auto& [p, _] : it->second) {
      if (seen.insert(p).second) stack.push_back(p);
    }
  }
  return false;
}

void Catalog::record_lineage(const LineageEdge& edge) {
  if (edge.parents.empty()) fail(ErrorCode::kInvalidArgument, "lineage edge needs at least one parent");
  std::unique_lock lock(mu_);
  if (!index_.count(edge.child)) fail(ErrorCode::kUnknownEntity, "child " + edge.child.str() + " not registered");
  for (const auto& p : edge.parents) {
    if (p == edge.child) fail(ErrorCode::kCycleDetected, "entity cannot be its own parent");
    if (!index_.count(p)) fail(ErrorCode::kUnknownEntity, "parent " + p.str() + " not registered");
  }
  // The new links p -> child close a cycle iff child is already an ancestor of some p.
  for (const auto& p : edge.parents) {
    if (reaches(p, edge.child)) fail(ErrorCode::kCycleDetected, "edge would make " + edge.child.str() + " its own ancestor");
  }
  std::vector<std::string> ids;
  for (const auto& p : edge.parents) ids.push_back(p.str());
  persist(lineage_out_, text::encode_kv({{"child", edge.child.str()},
                                         {"parents", text::join(ids, ",")},
                                         {"transform", edge.transform},
                                         {"when", std::to_string(clock_.now_ms())}}));
  auto& links = parents_[edge.child];
  for (const auto& p : edge.parents) links.emplace_back(p, edge.transform);
}

std::vector<Ancestor> Catalog::lineage_of(const EntityId& id) const {
  std::shared_lock lock(mu_);
  if (!index_.count(id)) fail(ErrorCode::kUnknownEntity, "entity " + id.str() + " not registered");
  std::vector<Ancestor> out;
  std::unordered_set<EntityId> seen{id};
  std::deque<EntityId> queue{id};
  while (!queue.empty()) {
    const EntityId cur = queue.front();
    queue.pop_front();
    const auto it = parents_.find(cur);
    if (it == parents_.end()) continue;
    for (const auto& [p, transform] : it->second) {
      if (!seen.insert(p).second) continue;
      out.push_back(Ancestor{p, transform});
      queue.push_back(p);
    }
  }
  return out;
}

void Catalog::note_access(const EntityId& id) {
  std::unique_lock lock(mu_);
  const auto it = index_.find(id);
  if (it == index_.end()) return;
  persist(catalog_out_, text::encode_kv({{"op", "access"}, {"entity", id.str()}}));
  ++entries_[it->second].operational.access_history_count;
}

}  // namespace lakelet
