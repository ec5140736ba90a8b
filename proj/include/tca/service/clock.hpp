#pragma once

#include <mutex>

#include "tca/core/time.hpp"

namespace tca {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
  virtual bool simulated() const { return false; }
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
};

/// Manually driven clock. Time never moves backwards.
class SimulatedClock final : public Clock {
 public:
  explicit SimulatedClock(Timestamp start) : now_(start) {}

  Timestamp now() const override;
  bool simulated() const override { return true; }

  /// Throws clock_regression when `t` is before the current time.
  void set(Timestamp t);
  void advance(minutes delta);

 private:
  mutable std::mutex mutex_;
  Timestamp now_;
};

}  // namespace tca
