#include <gtest/gtest.h>

#include <random>

#include "lakelet/text.hpp"
#include "lakelet/types.hpp"

namespace lakelet {
namespace {

TEST(Text, HexRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint8_t> bytes(rng() % 40);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    const auto hex = text::to_hex(bytes);
    EXPECT_EQ(hex.size(), bytes.size() * 2);
    EXPECT_EQ(text::from_hex(hex), bytes);
  }
  EXPECT_FALSE(text::from_hex("abc"));
  EXPECT_FALSE(text::from_hex("zz"));
}

TEST(Text, KvSurvivesSeparatorsInValues) {
  const text::KvRecord rec = {{"a", "x\ty"}, {"b", "line1\nline2"}, {"c", "p=q"}, {"d", ""}, {"e", "back\\slash"}};
  const auto line = text::encode_kv(rec);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(text::decode_kv(line), rec);
  EXPECT_EQ(text::kv_get(rec, "c"), "p=q");
  EXPECT_FALSE(text::kv_get(rec, "zz"));
}

TEST(Text, NumberParsing) {
  EXPECT_EQ(text::parse_int("42"), 42);
  EXPECT_EQ(text::parse_int("-7"), -7);
  EXPECT_FALSE(text::parse_int("4x"));
  EXPECT_FALSE(text::parse_int(""));
  EXPECT_DOUBLE_EQ(*text::parse_double("2.5"), 2.5);
  EXPECT_FALSE(text::parse_double("nope"));
  EXPECT_EQ(text::parse_double(text::format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Text, SplitJoinTrim) {
  EXPECT_EQ(text::split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(text::join({"a", "b", "c"}, "--"), "a--b--c");
  EXPECT_EQ(text::trim("  x y \t"), "x y");
}

TEST(EntityIdTest, ParseRoundTrip) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto id = EntityId::random(rng);
    EXPECT_FALSE(id.is_nil());
    EXPECT_EQ(id.str().size(), 32u);
    EXPECT_EQ(EntityId::parse(id.str()), id);
  }
  EXPECT_FALSE(EntityId::parse("xyz"));
}

TEST(Enums, NamesRoundTrip) {
  for (auto f : {FormatClass::kStructured, FormatClass::kSemiStructured, FormatClass::kUnstructured}) {
    EXPECT_EQ(parse_format(to_string(f)), f);
  }
  for (auto a : {Action::kRead, Action::kWrite, Action::kSubmit, Action::kAdmin}) {
    EXPECT_EQ(parse_action(to_string(a)), a);
  }
  for (auto s : {SourceKind::kBulk, SourceKind::kEvent, SourceKind::kStream}) {
    EXPECT_EQ(parse_source_kind(to_string(s)), s);
  }
}

}  // namespace
}  // namespace lakelet
