#include "lakelet/types.hpp"

#include "lakelet/text.hpp"

namespace lakelet {

EntityId EntityId::random(std::mt19937_64& rng) {
  EntityId id;
  do {
    id = EntityId(rng(), rng());
  } while (id.is_nil());
  return id;
}

std::optional<EntityId> EntityId::parse(std::string_view hex) {
  if (hex.size() != 32) return std::nullopt;
  for (char c : hex) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
  }
  const auto bytes = text::from_hex(hex);
  if (!bytes) return std::nullopt;
  std::uint64_t hi = 0, lo = 0;
  for (int i = 0; i < 8; ++i) hi = (hi << 8) | (*bytes)[i];
  for (int i = 8; i < 16; ++i) lo = (lo << 8) | (*bytes)[i];
  return EntityId(hi, lo);
}

std::string EntityId::str() const {
  std::array<std::uint8_t, 16> bytes{};
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<std::uint8_t>(hi_ >> (56 - 8 * i));
    bytes[8 + i] = static_cast<std::uint8_t>(lo_ >> (56 - 8 * i));
  }
  return text::to_hex(bytes);
}

std::string_view to_string(FormatClass f) {
  switch (f) {
    case FormatClass::kStructured: return "Structured";
    case FormatClass::kSemiStructured: return "SemiStructured";
    case FormatClass::kUnstructured: return "Unstructured";
  }
  return "Unstructured";
}

std::string_view to_string(SourceKind s) {
  switch (s) {
    case SourceKind::kBulk: return "Bulk";
    case SourceKind::kEvent: return "Event";
    case SourceKind::kStream: return "Stream";
  }
  return "Bulk";
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kRead: return "Read";
    case Action::kWrite: return "Write";
    case Action::kSubmit: return "Submit";
    case Action::kAdmin: return "Admin";
  }
  return "Read";
}

std::string_view to_string(Outcome o) { return o == Outcome::kAllow ? "Allow" : "Deny"; }

std::optional<FormatClass> parse_format(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "structured") return FormatClass::kStructured;
  if (l == "semistructured" || l == "semi-structured" || l == "semi") return FormatClass::kSemiStructured;
  if (l == "unstructured") return FormatClass::kUnstructured;
  return std::nullopt;
}

std::optional<SourceKind> parse_source_kind(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "bulk") return SourceKind::kBulk;
  if (l == "event") return SourceKind::kEvent;
  if (l == "stream") return SourceKind::kStream;
  return std::nullopt;
}

std::optional<Action> parse_action(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "read") return Action::kRead;
  if (l == "write") return Action::kWrite;
  if (l == "submit") return Action::kSubmit;
  if (l == "admin") return Action::kAdmin;
  return std::nullopt;
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "allow") return Outcome::kAllow;
  if (l == "deny") return Outcome::kDeny;
  return std::nullopt;
}

}  // namespace lakelet
