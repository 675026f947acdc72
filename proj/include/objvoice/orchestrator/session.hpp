#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "objvoice/backends/capabilities.hpp"
#include "objvoice/clock.hpp"
#include "objvoice/dialogue/history.hpp"
#include "objvoice/dialogue/recorder.hpp"
#include "objvoice/dialogue/request.hpp"
#include "objvoice/dialogue/speech.hpp"
#include "objvoice/orchestrator/events.hpp"
#include "objvoice/orchestrator/registry.hpp"
#include "objvoice/orchestrator/state.hpp"
#include "objvoice/persona/persona.hpp"
#include "objvoice/persona/store.hpp"
#include "objvoice/protocol/frame.hpp"
#include "objvoice/vision/pipeline.hpp"

namespace objvoice::orchestrator {

struct SessionConfig {
  double confidence_threshold = vision::kDefaultConfidenceThreshold;
  Micros grace_period = std::chrono::milliseconds(2000);
  Micros max_recording = std::chrono::seconds(30);
  std::string marker{dialogue::kDefaultMarker};
  std::size_t parallelism = dialogue::kDefaultParallelism;
  std::size_t acquaintance_frames = vision::kAcquaintanceFrames;
  backends::TrainOptions train;
  std::uint64_t dataset_seed = 0;
  double temperature = 0.7;
  int max_tokens = 256;
};

// What one bonding cycle said and produced.
struct CycleReport {
  std::uint32_t class_id = 0;
  std::string object_name;
  bool skipped = false;  // nothing intelligible was said
  std::string user_text;
  std::string reply;     // as returned by the chat model, markers included
  std::vector<std::string> segments;
  std::vector<dialogue::AudioClip> clips;
  bool speech_ok = true;
  dialogue::CycleMetrics metrics;
  std::int64_t at_ms = 0;
  std::string error;  // set when complete_cycle() absorbed a failure
};

struct WandOutcome {
  std::vector<protocol::ControlMessage> controls;
  bool cycle_ready = false;  // a recording was finalized; call complete_cycle()
};

// The single session loop's state: registry, tracking, the push-to-talk
// state machine and the stores behind it. Not thread-safe; one owner.
class Session {
 public:
  // Loads registry.json and model.json from `root` when present.
  // Throws Error(InvalidArgument) when a capability slot is empty.
  Session(std::filesystem::path root, backends::CapabilitySet capabilities, Clock& clock,
          SessionConfig config = {}, EventBus* events = nullptr);

  const SessionState& state() const { return state_; }
  const ObjectRegistry& registry() const { return registry_; }
  const std::optional<vision::ModelHandle>& model() const { return model_; }
  const Workspace& workspace() const { return workspace_; }
  const SessionConfig& config() const { return config_; }
  const std::vector<dialogue::CycleMetrics>& metrics() const { return metrics_; }
  persona::PersonaStore& personas() { return personas_; }
  const dialogue::HistoryStore& histories() const { return histories_; }

  // Collects frames, annotates them, rebuilds the union dataset, trains the
  // next model and generates a persona. Either everything is committed or
  // the workspace is left as it was.
  ObjectProfile acquaint(protocol::FrameSource& source, std::string label,
                         persona::Language language);

  // Runs detection and updates tracking. Detector failures count as "nothing
  // seen". Returns the thresholded detections.
  std::vector<vision::Detection> handle_frame(const protocol::ScopeFrame& frame);
  // Tracking update from detections computed elsewhere.
  void observe(std::span<const vision::Detection> detections);

  // Treats `class_id` as seen right now, as if the detector had reported it.
  // Used when there is no camera, e.g. talking to a profile from a terminal.
  void focus(std::uint32_t class_id);

  WandOutcome handle_wand(const protocol::WandMessage& msg, dialogue::Recorder& mic);
  // Time-driven transitions: recording auto-stop and tracking grace expiry.
  WandOutcome tick(dialogue::Recorder& mic);

  // Processes the finalized recording through the state machine. Failures
  // return the session to TRACKING and are reported in CycleReport::error.
  // Throws Error(InvalidState) when no recording is waiting.
  CycleReport complete_cycle(dialogue::PlaybackSink* sink = nullptr);

  // One bonding cycle with `class_id`, independent of the state machine.
  // History is persisted only once the reply is complete; any failure
  // before that leaves the stores untouched and propagates.
  CycleReport run_bonding_cycle(const dialogue::PcmAudio& audio, std::uint32_t class_id,
                                dialogue::PlaybackSink* sink = nullptr);

  persona::Persona edit_persona(std::uint32_t class_id,
                                const std::map<std::string, std::string>& overrides);

 private:
  CycleReport bond(const dialogue::PcmAudio& audio, std::uint32_t class_id,
                   dialogue::PlaybackSink* sink, bool drive_state);
  void apply(const Event& event, dialogue::Recorder* mic = nullptr, WandOutcome* outcome = nullptr);
  void emit(std::string type, nlohmann::ordered_json payload);
  std::optional<std::uint32_t> pick_active(std::span<const vision::Detection> detections) const;
  bool in_view() const;

  Workspace workspace_;
  backends::CapabilitySet caps_;
  Clock& clock_;
  SessionConfig config_;
  EventBus* events_;

  persona::PersonaStore personas_;
  dialogue::HistoryStore histories_;
  ObjectRegistry registry_;
  std::optional<vision::ModelHandle> model_;

  SessionState state_;
  std::optional<Micros> last_seen_;
  std::optional<Micros> recording_since_;
  std::uint16_t recording_seq_ = 0;
  std::optional<dialogue::PcmAudio> pending_audio_;
  std::vector<dialogue::CycleMetrics> metrics_;
  std::uint64_t clips_emitted_ = 0;
};

}  // namespace objvoice::orchestrator
