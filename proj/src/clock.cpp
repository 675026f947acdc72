#include "objvoice/clock.hpp"

#include <thread>

namespace objvoice {

namespace {
thread_local Micros t_slept{0};
}

SteadyClock::SteadyClock() : epoch_(std::chrono::steady_clock::now()) {}

Micros SteadyClock::now() const {
  return std::chrono::duration_cast<Micros>(std::chrono::steady_clock::now() - epoch_);
}

void SteadyClock::sleep_for(Micros d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

Micros VirtualClock::now() const {
  std::lock_guard lock(mu_);
  return now_;
}

Micros VirtualClock::task_time() const { return now() + t_slept; }

void VirtualClock::sleep_for(Micros d) {
  if (d.count() > 0) t_slept += d;
}

void VirtualClock::advance(Micros d) {
  std::lock_guard lock(mu_);
  now_ += d;
}

void VirtualClock::set(Micros t) {
  std::lock_guard lock(mu_);
  now_ = t;
}

}  // namespace objvoice
