#include "tca/service/clock.hpp"

#include "tca/core/error.hpp"

namespace tca {

Timestamp SystemClock::now() const {
  return std::chrono::floor<seconds>(std::chrono::system_clock::now());
}

Timestamp SimulatedClock::now() const {
  std::lock_guard lock(mutex_);
  return now_;
}

void SimulatedClock::set(Timestamp t) {
  std::lock_guard lock(mutex_);
  require(t >= now_, ErrorCode::clock_regression, "simulated clock cannot move backwards");
  now_ = t;
}

void SimulatedClock::advance(minutes delta) {
  require(delta.count() >= 0, ErrorCode::clock_regression, "clock advance must be non-negative");
  std::lock_guard lock(mutex_);
  now_ += delta;
}

}  // namespace tca
