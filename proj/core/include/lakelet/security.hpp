#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lakelet/audit.hpp"
#include "lakelet/clock.hpp"
#include "lakelet/types.hpp"

namespace lakelet {

// Shared lake secret used to sign tickets (HMAC-SHA256).
class Secret {
 public:
  static constexpr std::size_t kMinBytes = 32;

  explicit Secret(std::vector<std::uint8_t> bytes);
  static Secret from_hex(std::string_view hex);
  // Reads LAKELET_SECRET.
  static Secret from_env();

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

struct Ticket {
  std::string principal;
  std::set<std::string> roles;
  UnixMillis issued_at = 0;
  UnixMillis expires_at = 0;
  std::string signature;  // 64 lowercase hex chars

  // principal|role1,role2|issued_at|expires_at|hex_signature
  std::string serialize() const;
  static Ticket parse(std::string_view line);

  bool operator==(const Ticket&) const = default;
};

struct Identity {
  std::string principal;
  std::set<std::string> roles;
};

Ticket issue_ticket(std::string principal, std::set<std::string> roles, UnixMillis now,
                    std::int64_t ttl_ms, const Secret& secret);

// Accepts iff the signature verifies and issued_at <= now < expires_at.
Identity validate_ticket(const Ticket& ticket, UnixMillis now, const Secret& secret);

std::string ticket_signature(const Ticket& ticket, const Secret& secret);

using ActionSet = std::uint8_t;

constexpr ActionSet action_bit(Action a) { return static_cast<ActionSet>(1u << static_cast<int>(a)); }

struct Policy {
  std::string role;
  std::string resource_pattern;
  ActionSet actions = 0;

  bool allows(const std::set<std::string>& roles, std::string_view resource, Action action) const;
  bool operator==(const Policy&) const = default;
};

Policy make_policy(std::string role, std::string pattern, std::initializer_list<Action> actions);

std::string format_actions(ActionSet actions);
ActionSet parse_actions(std::string_view csv);

// Line-delimited `role<TAB>pattern<TAB>actions`.
std::vector<Policy> load_policies(const std::filesystem::path& file);
void save_policies(const std::filesystem::path& file, const std::vector<Policy>& policies);
std::string format_policy(const Policy& p);
Policy parse_policy(std::string_view line);

struct Decision {
  Outcome outcome = Outcome::kDeny;
  std::string reason;

  bool allowed() const { return outcome == Outcome::kAllow; }
};

// Ticket validation plus role-based policy evaluation. Every authorize()
// call appends exactly one audit event.
class Authorizer {
 public:
  Authorizer(Secret secret, Clock& clock, AuditLog& audit, std::vector<Policy> policies = {});

  Decision authorize(const Ticket& ticket, std::string_view resource, Action action);
  Decision authorize(const Ticket& ticket, std::string_view resource, Action action, UnixMillis now);

  // Throws AccessDenied when authorize() denies.
  Identity require(const Ticket& ticket, std::string_view resource, Action action);

  void replace_policies(std::vector<Policy> policies);
  std::shared_ptr<const std::vector<Policy>> policies() const;

  const Secret& secret() const { return secret_; }
  Clock& clock() { return clock_; }
  AuditLog& audit() { return audit_; }

 private:
  Secret secret_;
  Clock& clock_;
  AuditLog& audit_;
  mutable std::mutex mu_;
  std::shared_ptr<const std::vector<Policy>> policies_;
};

}  // namespace lakelet
