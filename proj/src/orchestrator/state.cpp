#include "objvoice/orchestrator/state.hpp"

namespace objvoice::orchestrator {

using protocol::ControlKind;

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Idle: return "IDLE";
    case Phase::Tracking: return "TRACKING";
    case Phase::Recording: return "RECORDING";
    case Phase::Transcribing: return "TRANSCRIBING";
    case Phase::Generating: return "GENERATING";
    case Phase::Speaking: return "SPEAKING";
  }
  return "?";
}

std::string to_string(const SessionState& state) {
  std::string out(to_string(state.phase));
  if (state.class_id) out += "(" + std::to_string(*state.class_id) + ")";
  return out;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ObjectSeen: return "OBJECT_SEEN";
    case EventKind::ObjectLost: return "OBJECT_LOST";
    case EventKind::TouchDown: return "TOUCH_DOWN";
    case EventKind::TouchUp: return "TOUCH_UP";
    case EventKind::RecordingTimeout: return "RECORDING_TIMEOUT";
    case EventKind::TranscriptReady: return "TRANSCRIPT_READY";
    case EventKind::TranscriptEmpty: return "TRANSCRIPT_EMPTY";
    case EventKind::ReplyReady: return "REPLY_READY";
    case EventKind::SpeechDone: return "SPEECH_DONE";
    case EventKind::Failure: return "FAILURE";
  }
  return "?";
}

Transition step(const SessionState& s, const Event& e) {
  Transition t{s, {}, Effect::None};
  auto go = [&](Phase phase, std::optional<std::uint32_t> id) {
    t.next = SessionState{phase, id};
  };

  switch (s.phase) {
    case Phase::Idle:
      if (e.kind == EventKind::ObjectSeen) {
        go(Phase::Tracking, e.class_id);
        t.effect = Effect::Activate;
      } else if (e.kind == EventKind::TouchDown) {
        t.controls.push_back({ControlKind::RecordRejected, e.wand_seq});
      }
      break;
    case Phase::Tracking:
      if (e.kind == EventKind::ObjectSeen && e.class_id != s.class_id) {
        go(Phase::Tracking, e.class_id);
        t.effect = Effect::Activate;
      } else if (e.kind == EventKind::ObjectLost) {
        go(Phase::Idle, std::nullopt);
      } else if (e.kind == EventKind::TouchDown) {
        go(Phase::Recording, s.class_id);
        t.controls.push_back({ControlKind::RecordStarted, e.wand_seq});
        t.effect = Effect::StartRecording;
      }
      break;
    case Phase::Recording:
      if (e.kind == EventKind::TouchUp || e.kind == EventKind::RecordingTimeout) {
        go(Phase::Transcribing, s.class_id);
        t.controls.push_back({ControlKind::VibrateOff, e.wand_seq});
        t.effect = Effect::StopRecording;
      }
      break;
    case Phase::Transcribing:
      if (e.kind == EventKind::TranscriptReady) {
        go(Phase::Generating, s.class_id);
      } else if (e.kind == EventKind::TranscriptEmpty || e.kind == EventKind::Failure) {
        go(Phase::Tracking, s.class_id);
      }
      break;
    case Phase::Generating:
      if (e.kind == EventKind::ReplyReady) {
        go(Phase::Speaking, s.class_id);
      } else if (e.kind == EventKind::Failure) {
        go(Phase::Tracking, s.class_id);
      }
      break;
    case Phase::Speaking:
      if (e.kind == EventKind::SpeechDone) {
        if (e.object_in_view) {
          go(Phase::Tracking, s.class_id);
        } else {
          go(Phase::Idle, std::nullopt);
        }
      } else if (e.kind == EventKind::Failure) {
        go(Phase::Tracking, s.class_id);
      }
      break;
  }
  return t;
}

}  // namespace objvoice::orchestrator
