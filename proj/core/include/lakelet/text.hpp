#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lakelet::text {

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string to_hex(std::string_view bytes);
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view hex);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view trim(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::string to_lower(std::string_view s);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Flat key=value records, one per line, fields separated by TAB. Values are
// escaped so that TAB, newline and backslash never appear raw.
using KvRecord = std::vector<std::pair<std::string, std::string>>;

std::string encode_kv(const KvRecord& record);
KvRecord decode_kv(std::string_view line);
std::optional<std::string> kv_get(const KvRecord& record, std::string_view key);

// Reads every line of a text file; a missing file yields no lines.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace lakelet::text
