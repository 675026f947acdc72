#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "objvoice/protocol/wand.hpp"

namespace objvoice::orchestrator {

enum class Phase { Idle, Tracking, Recording, Transcribing, Generating, Speaking };

inline constexpr Phase kAllPhases[] = {Phase::Idle,         Phase::Tracking,   Phase::Recording,
                                       Phase::Transcribing, Phase::Generating, Phase::Speaking};

std::string_view to_string(Phase phase);

// The session's position in the push-to-talk flow. Every phase but IDLE is
// bound to the object being talked to.
struct SessionState {
  Phase phase = Phase::Idle;
  std::optional<std::uint32_t> class_id;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

std::string to_string(const SessionState& state);  // e.g. "RECORDING(1)"

enum class EventKind {
  ObjectSeen,        // class_id
  ObjectLost,        // grace period expired without a detection
  TouchDown,         // wand_seq
  TouchUp,           // wand_seq
  RecordingTimeout,  // wand_seq of the TOUCH_DOWN that started it
  TranscriptReady,
  TranscriptEmpty,
  ReplyReady,
  SpeechDone,  // object_in_view
  Failure,
};

inline constexpr EventKind kAllEventKinds[] = {
    EventKind::ObjectSeen,       EventKind::ObjectLost,      EventKind::TouchDown,
    EventKind::TouchUp,          EventKind::RecordingTimeout, EventKind::TranscriptReady,
    EventKind::TranscriptEmpty,  EventKind::ReplyReady,      EventKind::SpeechDone,
    EventKind::Failure};

std::string_view to_string(EventKind kind);

struct Event {
  EventKind kind = EventKind::ObjectSeen;
  std::uint32_t class_id = 0;
  std::uint16_t wand_seq = 0;
  bool object_in_view = false;
};

enum class Effect {
  None,
  Activate,        // load the persona and history of next.class_id
  StartRecording,
  StopRecording,
};

struct Transition {
  SessionState next;
  std::vector<protocol::ControlMessage> controls;
  Effect effect = Effect::None;
};

// The whole transition table. Pairs it does not list leave the state
// unchanged and emit nothing.
Transition step(const SessionState& state, const Event& event);

}  // namespace objvoice::orchestrator
