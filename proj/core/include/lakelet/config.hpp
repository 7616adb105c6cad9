#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "lakelet/scheduler.hpp"
#include "lakelet/store.hpp"

namespace lakelet {

enum class ClockMode { kWall, kSimulated };

// Settings read from lakelet.conf (key=value lines, `#` comments). Keys:
// root, clock (wall|simulated), k, policy_file, capacity_bytes and a
// repeatable node=id:cpu:memory_mb.
struct LakeConfig {
  std::filesystem::path root = "lake";
  ClockMode clock = ClockMode::kWall;
  std::size_t default_k = 8;
  std::vector<NodeSpec> nodes = {{"node-1", 4, 8192}, {"node-2", 4, 8192}};
  std::filesystem::path policy_file;  // defaults to <root>/policies.tsv
  std::uint64_t capacity_bytes = Store::kDefaultCapacity;

  std::filesystem::path policies_path() const { return policy_file.empty() ? root / "policies.tsv" : policy_file; }
};

LakeConfig parse_config(std::string_view text, const std::filesystem::path& base = {});
// Missing file yields the defaults; relative paths resolve against the file's directory.
LakeConfig load_config(const std::filesystem::path& file);

NodeSpec parse_node_spec(std::string_view s);

}  // namespace lakelet
