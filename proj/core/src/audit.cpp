#include "lakelet/audit.hpp"

#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {
namespace {

text::KvRecord to_record(const AuditEvent& e) {
  return {{"when", std::to_string(e.when)},
          {"principal", e.principal},
          {"resource", e.resource},
          {"action", std::string(to_string(e.action))},
          {"outcome", std::string(to_string(e.outcome))},
          {"detail", e.detail}};
}

std::optional<AuditEvent> from_record(const text::KvRecord& r) {
  const auto when = text::kv_get(r, "when");
  const auto action = text::kv_get(r, "action");
  const auto outcome = text::kv_get(r, "outcome");
  if (!when || !action || !outcome) return std::nullopt;
  AuditEvent e;
  const auto w = text::parse_int(*when);
  const auto a = parse_action(*action);
  const auto o = parse_outcome(*outcome);
  if (!w || !a || !o) return std::nullopt;
  e.when = *w;
  e.action = *a;
  e.outcome = *o;
  e.principal = text::kv_get(r, "principal").value_or("");
  e.resource = text::kv_get(r, "resource").value_or("");
  e.detail = text::kv_get(r, "detail").value_or("");
  return e;
}

}  // namespace

bool AuditFilter::matches(const AuditEvent& e) const {
  if (principal && e.principal != *principal) return false;
  if (resource && e.resource != *resource) return false;
  if (outcome && e.outcome != *outcome) return false;
  if (since && e.when < *since) return false;
  if (until && e.when >= *until) return false;
  return true;
}

AuditLog::AuditLog(const std::filesystem::path& file) {
  for (const auto& line : text::read_lines(file.string())) {
    if (auto e = from_record(text::decode_kv(line))) events_.push_back(std::move(*e));
  }
  out_.open(file, std::ios::app);
  if (!out_) fail(ErrorCode::kIoFailure, "cannot open audit log " + file.string());
}

void AuditLog::append(AuditEvent event) {
  std::lock_guard lock(mu_);
  if (!events_.empty() && event.when < events_.back().when) event.when = events_.back().when;
  if (out_.is_open()) {
    out_ << text::encode_kv(to_record(event)) << '\n';
    out_.flush();
    if (!out_) fail(ErrorCode::kIoFailure, "audit append failed");
  }
  events_.push_back(std::move(event));
}

std::vector<AuditEvent> AuditLog::query(const AuditFilter& filter) const {
  std::lock_guard lock(mu_);
  std::vector<AuditEvent> out;
  for (const auto& e : events_) {
    if (filter.matches(e)) out.push_back(e);
  }
  return out;
}

std::size_t AuditLog::size() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

}  // namespace lakelet
