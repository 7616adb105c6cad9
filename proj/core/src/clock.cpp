#include "lakelet/clock.hpp"

#include <chrono>
#include <cmath>

namespace lakelet {

std::int64_t WallClock::now_micros() {
  const auto now = std::chrono::duration_cast<std::chrono::microseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  std::int64_t prev = last_.load(std::memory_order_relaxed);
  std::int64_t next = now;
  do {
    if (prev > next) next = prev;
  } while (!last_.compare_exchange_weak(prev, next, std::memory_order_acq_rel));
  return next;
}

void SimulatedClock::charge(double millis) {
  if (!(millis > 0.0)) return;
  advance_micros(static_cast<std::int64_t>(std::llround(millis * 1000.0)));
}

}  // namespace lakelet
