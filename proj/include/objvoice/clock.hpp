#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>

namespace objvoice {

using Micros = std::chrono::microseconds;

inline double to_ms(Micros d) { return static_cast<double>(d.count()) / 1000.0; }
inline std::int64_t whole_ms(Micros d) { return d.count() / 1000; }

// Time source injected everywhere time appears.
//
// now() is session time (zero at construction). task_time() is the time as
// observed by the calling thread, used to measure how long a piece of work
// took; for real clocks it equals now(), for virtual clocks it additionally
// includes everything the calling thread spent in sleep_for().
class Clock {
 public:
  virtual ~Clock() = default;

  virtual Micros now() const = 0;
  virtual Micros task_time() const = 0;
  virtual void sleep_for(Micros d) = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock();

  Micros now() const override;
  Micros task_time() const override { return now(); }
  void sleep_for(Micros d) override;

 private:
  std::chrono::steady_clock::time_point epoch_;
};

// Deterministic clock. Session time only moves through advance()/set().
// sleep_for() never blocks: it is charged to the calling thread, so work
// running on several threads at once is timed independently and exactly.
class VirtualClock final : public Clock {
 public:
  VirtualClock() = default;
  explicit VirtualClock(Micros start) : now_(start) {}

  Micros now() const override;
  Micros task_time() const override;
  void sleep_for(Micros d) override;

  void advance(Micros d);
  void set(Micros t);

 private:
  mutable std::mutex mu_;
  Micros now_{0};
};

// Measures elapsed task time around a unit of work.
class Stopwatch {
 public:
  explicit Stopwatch(const Clock& clock) : clock_(&clock), start_(clock.task_time()) {}

  Micros elapsed() const { return clock_->task_time() - start_; }
  double elapsed_ms() const { return to_ms(elapsed()); }

 private:
  const Clock* clock_;
  Micros start_;
};

}  // namespace objvoice
