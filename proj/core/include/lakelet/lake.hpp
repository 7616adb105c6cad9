#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lakelet/audit.hpp"
#include "lakelet/catalog.hpp"
#include "lakelet/clock.hpp"
#include "lakelet/security.hpp"
#include "lakelet/store.hpp"

namespace lakelet {

// One lake instance rooted at a directory: audit log, authorizer, blob store
// and catalog wired together.
class Lake {
 public:
  Lake(std::filesystem::path root, Secret secret, Clock& clock, std::vector<Policy> policies = {},
       std::uint64_t capacity_bytes = Store::kDefaultCapacity);

  Lake(const Lake&) = delete;
  Lake& operator=(const Lake&) = delete;

  // Guarded read that also bumps the entity's access history.
  std::string read(const EntityId& id, const Ticket& ticket);

  const std::filesystem::path& root() const { return root_; }
  Clock& clock() { return clock_; }
  AuditLog& audit() { return audit_; }
  Authorizer& auth() { return auth_; }
  Store& store() { return store_; }
  Catalog& catalog() { return catalog_; }

 private:
  std::filesystem::path root_;
  Clock& clock_;
  AuditLog audit_;
  Authorizer auth_;
  Store store_;
  Catalog catalog_;
};

}  // namespace lakelet
