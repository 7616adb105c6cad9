#pragma once

#include <atomic>
#include <cstdint>

namespace lakelet {

using UnixMillis = std::int64_t;

// Lake-wide time source. Every timestamp the lake records (arrival, catalog
// commit, audit, job transitions) is read from one Clock instance.
class Clock {
 public:
  virtual ~Clock() = default;

  virtual std::int64_t now_micros() = 0;

  UnixMillis now_ms() { return now_micros() / 1000; }

  // Accounts for `millis` of modeled work. A wall clock ignores it because
  // the real work already consumed real time.
  virtual void charge(double millis) = 0;
};

// System time, clamped so successive readings never go backwards.
class WallClock final : public Clock {
 public:
  std::int64_t now_micros() override;
  void charge(double) override {}

 private:
  std::atomic<std::int64_t> last_{0};
};

// Deterministic clock driven by explicit advances and charged work.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(UnixMillis start_ms = 0) : micros_(start_ms * 1000) {}

  std::int64_t now_micros() override { return micros_.load(std::memory_order_acquire); }
  void charge(double millis) override;

  void advance_ms(std::int64_t millis) { micros_.fetch_add(millis * 1000, std::memory_order_acq_rel); }
  void advance_micros(std::int64_t micros) { micros_.fetch_add(micros, std::memory_order_acq_rel); }

 private:
  std::atomic<std::int64_t> micros_;
};

}  // namespace lakelet
