#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lakelet/clock.hpp"
#include "lakelet/security.hpp"
#include "lakelet/types.hpp"

namespace lakelet {

struct EntityInfo {
  EntityId id;
  FormatClass format = FormatClass::kUnstructured;
  std::uint64_t size_bytes = 0;
  UnixMillis stored_at = 0;
};

// Flat blob store. Payloads are written verbatim to
// `<root>/objects/<first two hex chars>/<id>` and recorded in the append-only
// manifest `<root>/objects.log` (`id<TAB>format<TAB>size<TAB>unix_millis`).
class Store {
 public:
  static constexpr std::uint64_t kDefaultCapacity = 4ULL << 30;

  Store(std::filesystem::path root, Authorizer& auth, std::uint64_t capacity_bytes = kDefaultCapacity);

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  EntityId put_blob(std::string_view payload, FormatClass format, const Ticket& ticket);
  std::string get_blob(const EntityId& id, const Ticket& ticket);
  std::vector<EntityInfo> list_entities(std::optional<FormatClass> filter, const Ticket& ticket);

  // Unguarded lookups for in-process collaborators (catalog, analytics).
  bool contains(const EntityId& id) const;
  std::optional<EntityInfo> info(const EntityId& id) const;
  std::string read_verbatim(const EntityId& id) const;

  std::size_t size() const;
  std::uint64_t used_bytes() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path object_path(const EntityId& id) const;
  EntityId fresh_id();

  std::filesystem::path root_;
  Authorizer& auth_;
  std::uint64_t capacity_;

  mutable std::mutex mu_;
  std::vector<EntityInfo> order_;
  std::unordered_map<EntityId, std::size_t> index_;
  std::uint64_t used_ = 0;
  std::uint64_t reserved_ = 0;
  std::ofstream manifest_;
  std::mt19937_64 rng_;
};

}  // namespace lakelet
