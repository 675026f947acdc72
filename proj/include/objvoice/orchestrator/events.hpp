#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace objvoice::orchestrator {

// Session API message: one JSON object per line, {"type", "payload", "seq"}.
// Types: STATE, DETECTION, TRANSCRIPT, AUDIO_SEGMENT, CONTROL.
struct SessionEvent {
  std::string type;
  nlohmann::ordered_json payload;
  std::uint64_t seq = 0;

  std::string to_line() const;
  // Throws Error(ParseError).
  static SessionEvent from_line(std::string_view line);
};

// Recent synthesized clips as WAV bytes, by clip number.
class AudioShelf {
 public:
  explicit AudioShelf(std::size_t capacity = 256) : capacity_(capacity) {}

  void put(std::uint64_t clip, std::vector<std::uint8_t> wav);
  std::optional<std::vector<std::uint8_t>> get(std::uint64_t clip) const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::map<std::uint64_t, std::vector<std::uint8_t>> clips_;
};

// Ordered event log with a bounded backlog. Sequence numbers start at 1 and
// strictly increase; readers poll for everything after the last seq seen.
class EventBus {
 public:
  explicit EventBus(std::size_t backlog = 4096) : backlog_(backlog) {}

  std::uint64_t publish(std::string type, nlohmann::ordered_json payload);

  // Events with seq > after, waiting up to `wait` for the first one.
  std::vector<SessionEvent> since(std::uint64_t after, std::chrono::milliseconds wait =
                                                          std::chrono::milliseconds(0)) const;
  std::uint64_t last_seq() const;

  AudioShelf& audio() { return audio_; }
  const AudioShelf& audio() const { return audio_; }

 private:
  AudioShelf audio_;
  std::size_t backlog_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::deque<SessionEvent> log_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace objvoice::orchestrator
