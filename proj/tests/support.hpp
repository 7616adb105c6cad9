#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "lakelet/audit.hpp"
#include "lakelet/clock.hpp"
#include "lakelet/error.hpp"
#include "lakelet/lake.hpp"
#include "lakelet/security.hpp"

namespace lakelet::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("lakelet-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline Secret test_secret(std::uint8_t salt = 0) {
  std::vector<std::uint8_t> bytes(32);
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(i * 7 + salt);
  return Secret(bytes);
}

inline constexpr UnixMillis kT0 = 1'600'000'000'000;

// A lake whose single role "rw" may read and write everything under store/.
struct LakeFixture {
  TempDir dir;
  SimulatedClock clock{kT0};
  std::unique_ptr<Lake> lake;
  Ticket ticket;

  explicit LakeFixture(std::vector<Policy> policies = {make_policy("rw", "store/**", {Action::kRead, Action::kWrite})},
                       std::uint64_t capacity = Store::kDefaultCapacity) {
    lake = std::make_unique<Lake>(dir.path() / "lake", test_secret(), clock, std::move(policies), capacity);
    ticket = issue_ticket("tester", {"rw"}, clock.now_ms(), 86'400'000, test_secret());
  }

  void reopen() {
    auto policies = *lake->auth().policies();
    lake.reset();
    lake = std::make_unique<Lake>(dir.path() / "lake", test_secret(), clock, std::move(policies));
  }
};

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected a lakelet::Error");
}

}  // namespace lakelet::testing
