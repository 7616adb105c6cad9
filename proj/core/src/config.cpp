#include "lakelet/config.hpp"

#include <fstream>
#include <iterator>

#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {

NodeSpec parse_node_spec(std::string_view s) {
  const auto parts = text::split(s, ':');
  if (parts.size() != 3) fail(ErrorCode::kParseError, "node spec must be id:cpu:memory_mb: " + std::string(s));
  const auto cpu = text::parse_int(parts[1]);
  const auto mem = text::parse_int(parts[2]);
  if (parts[0].empty() || !cpu || !mem || *cpu <= 0 || *mem <= 0) {
    fail(ErrorCode::kParseError, "bad node spec: " + std::string(s));
  }
  return {parts[0], static_cast<int>(*cpu), *mem};
}

LakeConfig parse_config(std::string_view body, const std::filesystem::path& base) {
  LakeConfig c;
  bool nodes_seen = false;
  auto resolve = [&](std::string_view p) {
    std::filesystem::path path{std::string(p)};
    return path.is_relative() && !base.empty() ? base / path : path;
  };
  c.root = resolve("lake");
  for (auto raw : text::split(body, '\n')) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kParseError, "config line lacks '=': " + std::string(line));
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (key == "root") {
      c.root = resolve(value);
    } else if (key == "clock") {
      if (value == "wall") {
        c.clock = ClockMode::kWall;
      } else if (value == "simulated") {
        c.clock = ClockMode::kSimulated;
      } else {
        fail(ErrorCode::kParseError, "clock must be wall or simulated");
      }
    } else if (key == "k") {
      const auto k = text::parse_int(value);
      if (!k || *k <= 0) fail(ErrorCode::kParseError, "k must be a positive integer");
      c.default_k = static_cast<std::size_t>(*k);
    } else if (key == "policy_file") {
      c.policy_file = resolve(value);
    } else if (key == "capacity_bytes") {
      const auto v = text::parse_int(value);
      if (!v || *v <= 0) fail(ErrorCode::kParseError, "capacity_bytes must be positive");
      c.capacity_bytes = static_cast<std::uint64_t>(*v);
    } else if (key == "node") {
      if (!nodes_seen) c.nodes.clear();
      nodes_seen = true;
      c.nodes.push_back(parse_node_spec(value));
    } else {
      fail(ErrorCode::kParseError, "unknown config key: " + key);
    }
  }
  return c;
}

LakeConfig load_config(const std::filesystem::path& file) {
  const auto base = file.parent_path();
  std::ifstream in(file);
  if (!in) return parse_config("", base);
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(body, base);
}

}  // namespace lakelet
