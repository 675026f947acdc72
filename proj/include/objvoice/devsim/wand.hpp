#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "objvoice/clock.hpp"
#include "objvoice/dialogue/recorder.hpp"
#include "objvoice/protocol/channel.hpp"
#include "objvoice/protocol/wand.hpp"

namespace objvoice::devsim {

struct WandEvent {
  std::int64_t at_ms = 0;
  protocol::WandKind kind = protocol::WandKind::TouchDown;
  // What the user says while holding the wand (TOUCH_DOWN only).
  std::string say;
};

struct WandScript {
  std::vector<WandEvent> events;

  // Non-decreasing times, strictly alternating kinds starting with
  // TOUCH_DOWN. Throws Error(ScriptInvalid).
  void validate() const;

  // {"events": [{"at_ms": 100, "kind": "TOUCH_DOWN", "say": "hello"}, ...]}
  static WandScript parse(std::string_view document);
  static WandScript load(const std::filesystem::path& path);
};

// Encoded frames and their emission times; sequences count up from 0.
std::vector<std::pair<std::int64_t, protocol::WireFrame>> wand_schedule(const WandScript& script);

// Replays a script into a byte channel and tracks the engine's haptic replies.
class VirtualWand {
 public:
  VirtualWand(WandScript script, protocol::ByteChannel& channel);

  // Writes every event due at or before `t_ms`; returns how many were written.
  std::size_t emit_until(std::int64_t t_ms);
  std::optional<std::int64_t> next_event_ms() const;
  bool finished() const { return next_ >= schedule_.size(); }

  // Emits each event after moving `clock` to its time.
  void run(VirtualClock& clock);

  // Drains pending control frames from the channel.
  void poll_feedback(std::chrono::milliseconds wait = std::chrono::milliseconds(0));
  bool vibrating() const { return vibrating_; }
  std::size_t record_started_count() const { return started_; }
  std::size_t record_rejected_count() const { return rejected_; }
  const std::vector<protocol::ControlMessage>& feedback() const { return feedback_; }

 private:
  std::vector<std::pair<std::int64_t, protocol::WireFrame>> schedule_;
  std::size_t next_ = 0;
  protocol::ByteChannel& channel_;
  protocol::ControlStreamDecoder decoder_;
  std::vector<protocol::ControlMessage> feedback_;
  bool vibrating_ = false;
  std::size_t started_ = 0;
  std::size_t rejected_ = 0;
};

// Microphone that "hears" the text of the latest TOUCH_DOWN at or before
// the time recording starts.
class VirtualMicrophone final : public dialogue::TextMicrophone {
 public:
  explicit VirtualMicrophone(WandScript script) : script_(std::move(script)) {}

 protected:
  void on_start(Micros at) override;

 private:
  WandScript script_;
};

}  // namespace objvoice::devsim
