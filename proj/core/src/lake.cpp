#include "lakelet/lake.hpp"

namespace lakelet {
namespace {

std::filesystem::path ensure_root(const std::filesystem::path& root) {
  std::filesystem::create_directories(root);
  return root;
}

}  // namespace

Lake::Lake(std::filesystem::path root, Secret secret, Clock& clock, std::vector<Policy> policies,
           std::uint64_t capacity_bytes)
    : root_(ensure_root(root)),
      clock_(clock),
      audit_(root_ / "audit.log"),
      auth_(std::move(secret), clock_, audit_, std::move(policies)),
      store_(root_, auth_, capacity_bytes),
      catalog_(root_, store_, clock_, audit_) {}

std::string Lake::read(const EntityId& id, const Ticket& ticket) {
  std::string bytes = store_.get_blob(id, ticket);
  catalog_.note_access(id);
  return bytes;
}

}  // namespace lakelet
