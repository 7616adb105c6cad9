#include "lakelet/classify.hpp"

#include "json.hpp"

#include "lakelet/text.hpp"

namespace lakelet {
namespace {

constexpr std::size_t kProbeLines = 10;
constexpr char kDelimiters[] = {',', '\t', ';', '|'};

bool looks_hierarchical(std::string_view payload) {
  const auto body = text::trim(payload);
  if (body.empty()) return false;
  if (!((body.front() == '{' && body.back() == '}') || (body.front() == '[' && body.back() == ']'))) {
    return false;
  }
  return nlohmann::json::accept(body);
}

}  // namespace

std::vector<std::string_view> payload_lines(std::string_view payload, std::size_t limit) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= payload.size()) {
    if (limit && lines.size() == limit) break;
    auto end = payload.find('\n', start);
    if (end == std::string_view::npos) end = payload.size();
    auto line = payload.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!text::trim(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(std::string_view line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::optional<char> detect_delimiter(std::string_view payload) {
  const auto lines = payload_lines(payload, kProbeLines);
  if (lines.size() < 2) return std::nullopt;
  for (char delim : kDelimiters) {
    const auto columns = split_fields(lines.front(), delim).size();
    if (columns < 2) continue;
    bool consistent = true;
    for (std::size_t i = 1; i < lines.size() && consistent; ++i) {
      consistent = split_fields(lines[i], delim).size() == columns;
    }
    if (consistent) return delim;
  }
  return std::nullopt;
}

FormatClass classify_format(std::string_view payload) {
  if (looks_hierarchical(payload)) return FormatClass::kSemiStructured;
  if (detect_delimiter(payload)) return FormatClass::kStructured;
  return FormatClass::kUnstructured;
}

}  // namespace lakelet
