#include "lakelet/security.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cstdlib>
#include <fstream>

#include "lakelet/error.hpp"
#include "lakelet/glob.hpp"
#include "lakelet/text.hpp"

namespace lakelet {
namespace {

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == '|' || c == ',' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

std::string signing_message(const Ticket& t) {
  std::string msg = t.principal;
  msg.push_back('\n');
  bool first = true;
  for (const auto& r : t.roles) {  // std::set iterates in sorted order
    if (!first) msg.push_back(',');
    msg += r;
    first = false;
  }
  msg.push_back('\n');
  msg += std::to_string(t.issued_at);
  msg.push_back('\n');
  msg += std::to_string(t.expires_at);
  return msg;
}

}  // namespace

Secret::Secret(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
  if (bytes_.size() < kMinBytes) {
    fail(ErrorCode::kInvalidArgument, "lake secret must be at least 32 bytes");
  }
}

Secret Secret::from_hex(std::string_view hex) {
  auto bytes = text::from_hex(text::trim(hex));
  if (!bytes) fail(ErrorCode::kInvalidArgument, "lake secret is not valid hex");
  return Secret(std::move(*bytes));
}

Secret Secret::from_env() {
  const char* v = std::getenv("LAKELET_SECRET");
  if (v == nullptr) fail(ErrorCode::kInvalidArgument, "LAKELET_SECRET is not set");
  return from_hex(v);
}

std::string Ticket::serialize() const {
  return principal + "|" + text::join({roles.begin(), roles.end()}, ",") + "|" +
         std::to_string(issued_at) + "|" + std::to_string(expires_at) + "|" + signature;
}

Ticket Ticket::parse(std::string_view line) {
  const auto parts = text::split(text::trim(line), '|');
  if (parts.size() != 5) fail(ErrorCode::kParseError, "ticket must have 5 '|'-separated fields");
  Ticket t;
  t.principal = parts[0];
  if (!parts[1].empty()) {
    for (auto& r : text::split(parts[1], ',')) t.roles.insert(std::move(r));
  }
  const auto issued = text::parse_int(parts[2]);
  const auto expires = text::parse_int(parts[3]);
  if (!issued || !expires) fail(ErrorCode::kParseError, "ticket timestamps must be integers");
  t.issued_at = *issued;
  t.expires_at = *expires;
  t.signature = parts[4];
  return t;
}

std::string ticket_signature(const Ticket& ticket, const Secret& secret) {
  const std::string msg = signing_message(ticket);
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), secret.bytes().data(), static_cast<int>(secret.bytes().size()),
       reinterpret_cast<const unsigned char*>(msg.data()), msg.size(), mac, &len);
  return text::to_hex(std::span<const std::uint8_t>(mac, len));
}

Ticket issue_ticket(std::string principal, std::set<std::string> roles, UnixMillis now,
                    std::int64_t ttl_ms, const Secret& secret) {
  if (!valid_name(principal)) fail(ErrorCode::kInvalidPrincipal, "principal must be non-empty and free of '|' ','");
  if (ttl_ms <= 0) fail(ErrorCode::kInvalidPrincipal, "ttl must be positive");
  for (const auto& r : roles) {
    if (!valid_name(r)) fail(ErrorCode::kInvalidPrincipal, "invalid role name '" + r + "'");
  }
  Ticket t;
  t.principal = std::move(principal);
  t.roles = std::move(roles);
  t.issued_at = now;
  t.expires_at = now + ttl_ms;
  t.signature = ticket_signature(t, secret);
  return t;
}

Identity validate_ticket(const Ticket& ticket, UnixMillis now, const Secret& secret) {
  const std::string expected = ticket_signature(ticket, secret);
  if (ticket.signature.size() != expected.size() ||
      CRYPTO_memcmp(ticket.signature.data(), expected.data(), expected.size()) != 0) {
    fail(ErrorCode::kBadSignature, "ticket signature does not verify");
  }
  if (ticket.expires_at <= ticket.issued_at) fail(ErrorCode::kExpired, "ticket has an empty validity window");
  if (now < ticket.issued_at) fail(ErrorCode::kExpired, "ticket not yet valid");
  if (now >= ticket.expires_at) fail(ErrorCode::kExpired, "ticket expired");
  return Identity{ticket.principal, ticket.roles};
}

bool Policy::allows(const std::set<std::string>& roles, std::string_view resource, Action action) const {
  return (actions & action_bit(action)) != 0 && roles.count(role) != 0 &&
         glob_match(resource_pattern, resource);
}

Policy make_policy(std::string role, std::string pattern, std::initializer_list<Action> actions) {
  Policy p{std::move(role), std::move(pattern), 0};
  for (Action a : actions) p.actions |= action_bit(a);
  if (p.actions == 0) fail(ErrorCode::kInvalidArgument, "policy needs at least one action");
  if (!is_valid_glob(p.resource_pattern)) fail(ErrorCode::kInvalidArgument, "invalid resource pattern");
  if (!valid_name(p.role)) fail(ErrorCode::kInvalidArgument, "invalid role name");
  return p;
}

std::string format_actions(ActionSet actions) {
  std::vector<std::string> names;
  for (Action a : {Action::kRead, Action::kWrite, Action::kSubmit, Action::kAdmin}) {
    if (actions & action_bit(a)) names.emplace_back(to_string(a));
  }
  return text::join(names, ",");
}

ActionSet parse_actions(std::string_view csv) {
  ActionSet set = 0;
  for (const auto& name : text::split(csv, ',')) {
    const auto a = parse_action(text::trim(name));
    if (!a) fail(ErrorCode::kParseError, "unknown action '" + name + "'");
    set |= action_bit(*a);
  }
  return set;
}

std::string format_policy(const Policy& p) {
  return p.role + "\t" + p.resource_pattern + "\t" + format_actions(p.actions);
}

Policy parse_policy(std::string_view line) {
  const auto parts = text::split(line, '\t');
  if (parts.size() != 3) fail(ErrorCode::kParseError, "policy line needs role<TAB>pattern<TAB>actions");
  Policy p{parts[0], parts[1], parse_actions(parts[2])};
  if (p.actions == 0 || !is_valid_glob(p.resource_pattern) || !valid_name(p.role)) {
    fail(ErrorCode::kParseError, "invalid policy line");
  }
  return p;
}

std::vector<Policy> load_policies(const std::filesystem::path& file) {
  std::vector<Policy> out;
  for (const auto& line : text::read_lines(file.string())) {
    if (text::trim(line).empty() || line.front() == '#') continue;
    out.push_back(parse_policy(line));
  }
  return out;
}

void save_policies(const std::filesystem::path& file, const std::vector<Policy>& policies) {
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const auto& p : policies) out << format_policy(p) << '\n';
    if (!out) fail(ErrorCode::kIoFailure, "cannot write " + tmp);
  }
  std::filesystem::rename(tmp, file);
}

Authorizer::Authorizer(Secret secret, Clock& clock, AuditLog& audit, std::vector<Policy> policies)
    : secret_(std::move(secret)),
      clock_(clock),
      audit_(audit),
      policies_(std::make_shared<const std::vector<Policy>>(std::move(policies))) {}

void Authorizer::replace_policies(std::vector<Policy> policies) {
  auto next = std::make_shared<const std::vector<Policy>>(std::move(policies));
  std::lock_guard lock(mu_);
  policies_ = std::move(next);
}

std::shared_ptr<const std::vector<Policy>> Authorizer::policies() const {
  std::lock_guard lock(mu_);
  return policies_;
}

Decision Authorizer::authorize(const Ticket& ticket, std::string_view resource, Action action) {
  return authorize(ticket, resource, action, clock_.now_ms());
}

Decision Authorizer::authorize(const Ticket& ticket, std::string_view resource, Action action,
                               UnixMillis now) {
  Decision d;
  try {
    const Identity id = validate_ticket(ticket, now, secret_);
    d.reason = "no matching policy";
    for (const auto& p : *policies()) {
      if (p.allows(id.roles, resource, action)) {
        d.outcome = Outcome::kAllow;
        d.reason = "policy " + p.role + ":" + p.resource_pattern;
        break;
      }
    }
  } catch (const Error& e) {
    d.outcome = Outcome::kDeny;
    d.reason = std::string(to_string(e.code()));
  }
  audit_.append(AuditEvent{now, ticket.principal, std::string(resource), action, d.outcome, d.reason});
  return d;
}

Identity Authorizer::require(const Ticket& ticket, std::string_view resource, Action action) {
  const Decision d = authorize(ticket, resource, action);
  if (!d.allowed()) {
    fail(ErrorCode::kAccessDenied, std::string(to_string(action)) + " on " + std::string(resource) + ": " + d.reason);
  }
  return Identity{ticket.principal, ticket.roles};
}

}  // namespace lakelet
