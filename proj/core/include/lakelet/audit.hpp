#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lakelet/clock.hpp"
#include "lakelet/types.hpp"

namespace lakelet {

struct AuditEvent {
  UnixMillis when = 0;
  std::string principal;
  std::string resource;
  Action action = Action::kRead;
  Outcome outcome = Outcome::kDeny;
  std::string detail;

  bool operator==(const AuditEvent&) const = default;
};

struct AuditFilter {
  std::optional<std::string> principal;
  std::optional<std::string> resource;
  std::optional<Outcome> outcome;
  std::optional<UnixMillis> since;  // inclusive
  std::optional<UnixMillis> until;  // exclusive

  bool matches(const AuditEvent& e) const;
};

// Append-only interaction log. An event is flushed to `audit.log` before
// append() returns; `when` is clamped so the log never goes back in time.
class AuditLog {
 public:
  AuditLog() = default;  // memory only
  explicit AuditLog(const std::filesystem::path& file);

  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  void append(AuditEvent event);
  std::vector<AuditEvent> query(const AuditFilter& filter = {}) const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<AuditEvent> events_;
  std::ofstream out_;
};

}  // namespace lakelet
