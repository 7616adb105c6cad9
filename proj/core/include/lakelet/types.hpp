#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace lakelet {

// 128-bit entity identifier, rendered as 32 lowercase hex characters.
class EntityId {
 public:
  EntityId() = default;
  EntityId(std::uint64_t hi, std::uint64_t lo) : hi_(hi), lo_(lo) {}

  static EntityId random(std::mt19937_64& rng);
  static std::optional<EntityId> parse(std::string_view hex);

  std::string str() const;
  std::uint64_t hi() const { return hi_; }
  std::uint64_t lo() const { return lo_; }
  bool is_nil() const { return hi_ == 0 && lo_ == 0; }

  auto operator<=>(const EntityId&) const = default;

 private:
  std::uint64_t hi_ = 0;
  std::uint64_t lo_ = 0;
};

enum class FormatClass { kStructured, kSemiStructured, kUnstructured };
enum class SourceKind { kBulk, kEvent, kStream };
enum class Action { kRead, kWrite, kSubmit, kAdmin };
enum class Outcome { kAllow, kDeny };

std::string_view to_string(FormatClass f);
std::string_view to_string(SourceKind s);
std::string_view to_string(Action a);
std::string_view to_string(Outcome o);

std::optional<FormatClass> parse_format(std::string_view s);
std::optional<SourceKind> parse_source_kind(std::string_view s);
std::optional<Action> parse_action(std::string_view s);
std::optional<Outcome> parse_outcome(std::string_view s);

}  // namespace lakelet

template <>
struct std::hash<lakelet::EntityId> {
  std::size_t operator()(const lakelet::EntityId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.hi() ^ (id.lo() * 0x9e3779b97f4a7c15ULL));
  }
};
