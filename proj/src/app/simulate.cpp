#include "objvoice/app/simulate.hpp"

#include <cstdio>
#include <limits>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::app {

namespace fs = std::filesystem;

namespace {

std::string stamp(const Clock& clock) {
  const auto ms = whole_ms(clock.now());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "[%02lld:%02lld.%03lld] ", static_cast<long long>(ms / 60000),
                static_cast<long long>(ms / 1000 % 60), static_cast<long long>(ms % 1000));
  return buf;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

class TranscriptLog {
 public:
  explicit TranscriptLog(const Clock& clock) : clock_(clock) {}
  void line(const std::string& text) { out_ += stamp(clock_) + text + "\n"; }
  const std::string& text() const { return out_; }

 private:
  const Clock& clock_;
  std::string out_;
};

}  // namespace

SimulationResult run_simulation(const AppConfig& config, const devsim::SceneScript& scene,
                                const devsim::WandScript& wand_script, std::uint64_t seed,
                                const devsim::SpriteLibrary& sprites, const fs::path& workspace) {
  scene.validate(sprites);
  wand_script.validate();
  auto sprite_ptr = std::make_shared<const devsim::SpriteLibrary>(sprites);

  VirtualClock clock;
  orchestrator::EventBus bus(1u << 20);
  auto caps = backends::make_capabilities(config.backends, clock, workspace / "models");
  orchestrator::Session session(workspace, caps, clock, config.session, &bus);

  SimulationResult result;
  TranscriptLog log(clock);

  for (const auto& step : scene.acquaint) {
    devsim::SimulatedScope scope(scene, sprite_ptr, seed, step.first_frame, step.last_frame + 1);
    const auto profile = session.acquaint(scope, step.label, config.language);
    const auto persona = session.personas().load(profile.class_id);
    log.line("ACQUAINTED class=" + std::to_string(profile.class_id) + " label=" + profile.label +
             " name=" + persona.name + " voice=" + std::string(persona::to_string(persona.voice)) +
             " language=" + std::string(persona::to_string(persona.language)));
  }

  auto [engine_end, wand_end] = protocol::make_pipe();
  devsim::VirtualWand wand(wand_script, *wand_end);
  devsim::VirtualMicrophone mic(wand_script);
  protocol::WandStreamDecoder decoder;
  orchestrator::SessionState last_state = session.state();
  std::size_t cycle_no = 0;

  auto note_state = [&] {
    if (session.state() != last_state) {
      last_state = session.state();
      if (last_state.phase == orchestrator::Phase::Recording) ++result.recordings;
      log.line("STATE " + orchestrator::to_string(last_state));
    }
  };

  auto handle_outcome = [&](const orchestrator::WandOutcome& outcome) {
    for (const auto& c : outcome.controls) {
      engine_end->write(protocol::encode_control_message(c));
      log.line("CONTROL " + std::string(protocol::to_string(c.kind)) + " seq=" + std::to_string(c.sequence));
    }
    note_state();
    wand.poll_feedback();
    if (!outcome.cycle_ready) return;

    orchestrator::CycleReport report = session.complete_cycle();
    ++cycle_no;
    const std::string who = "(" + std::to_string(report.class_id) + ")";
    if (!report.error.empty() && report.user_text.empty()) {
      log.line("CYCLE " + std::to_string(cycle_no) + " FAILED " + report.error);
    } else if (report.skipped) {
      log.line("CYCLE " + std::to_string(cycle_no) + " SKIPPED (empty transcript)");
    } else {
      log.line("USER" + who + ": " + report.user_text);
      log.line("OBJECT" + who + " " + report.object_name + ": " + report.reply);
      for (const auto& clip : report.clips) {
        log.line("  segment " + std::to_string(clip.segment_index) + " \"" +
                 report.segments[clip.segment_index] + "\" audio_ms=" + fixed(clip.duration_ms()) +
                 " synth_ms=" + fixed(clip.synth_ms) + " rtf=" + fixed(dialogue::rtf(clip), 6));
      }
      if (!report.speech_ok) log.line("  speech failed: " + report.error);
    }
    result.cycles.push_back(std::move(report));
    note_state();
  };

  auto pump_wand = [&] {
    for (const auto& msg : decoder.feed(engine_end->read(std::chrono::milliseconds(0)))) {
      log.line("WAND " + std::string(protocol::to_string(msg.kind)) + " seq=" + std::to_string(msg.sequence));
      handle_outcome(session.handle_wand(msg, mic));
    }
  };

  auto run_wand_until = [&](std::int64_t t_ms) {
    while (auto next = wand.next_event_ms()) {
      if (*next > t_ms) break;
      const Micros at = std::chrono::milliseconds(*next);
      if (clock.now() < at) clock.set(at);
      wand.emit_until(*next);
      pump_wand();
    }
  };

  const std::int64_t t0 = scene.timestamp_ms(scene.session_start_frame);
  for (int frame = scene.session_start_frame; frame < scene.duration_frames; ++frame) {
    const std::int64_t t = scene.timestamp_ms(frame) - t0;
    run_wand_until(t);
    const Micros at = std::chrono::milliseconds(t);
    if (clock.now() < at) clock.set(at);
    session.handle_frame(devsim::render_frame(scene, sprites, frame, seed));
    note_state();
    handle_outcome(session.tick(mic));
  }
  run_wand_until(std::numeric_limits<std::int64_t>::max());

  result.transcript = log.text();
  result.summary = dialogue::summarize(session.metrics());
  result.events = bus.since(0);
  result.record_started = wand.record_started_count();
  result.record_rejected = wand.record_rejected_count();
  return result;
}

void write_simulation_outputs(const SimulationResult& result, const fs::path& out_dir) {
  util::ensure_directory(out_dir);
  util::write_atomic(out_dir / "transcript.txt", result.transcript);
  util::write_atomic(out_dir / "metrics.txt", dialogue::format_metrics(result.summary));
  std::string events;
  for (const auto& e : result.events) {
    if (e.type != "DETECTION") events += e.to_line();
  }
  util::write_atomic(out_dir / "events.jsonl", events);

  const fs::path audio_dir = out_dir / "audio";
  fs::remove_all(audio_dir);
  util::ensure_directory(audio_dir);
  for (std::size_t c = 0; c < result.cycles.size(); ++c) {
    for (const auto& clip : result.cycles[c].clips) {
      char name[64];
      std::snprintf(name, sizeof(name), "cycle%02zu_seg%02zu.wav", c + 1, clip.segment_index);
      dialogue::PcmAudio audio;
      audio.samples = clip.samples;
      dialogue::write_wav(audio_dir / name, audio);
    }
  }
}

vision::DetectionReport run_evaluation(const AppConfig& config, const devsim::SceneScript& scene,
                                       std::uint32_t truth, std::uint64_t seed,
                                       const devsim::SpriteLibrary& sprites,
                                       const fs::path& workspace, std::size_t n) {
  scene.validate(sprites);
  auto sprite_ptr = std::make_shared<const devsim::SpriteLibrary>(sprites);
  VirtualClock clock;
  auto caps = backends::make_capabilities(config.backends, clock, workspace / "models");
  orchestrator::Session session(workspace, caps, clock, config.session);
  for (const auto& step : scene.acquaint) {
    devsim::SimulatedScope scope(scene, sprite_ptr, seed, step.first_frame, step.last_frame + 1);
    session.acquaint(scope, step.label, config.language);
  }
  if (!session.model()) throw Error(Errc::InvalidState, "scene acquaints no objects");
  if (truth >= session.model()->class_names.size()) {
    throw Error(Errc::InvalidArgument, "truth class " + std::to_string(truth) + " is not registered");
  }
  devsim::SimulatedScope stream(scene, sprite_ptr, seed, scene.session_start_frame, scene.duration_frames);
  return vision::evaluate_stream(stream, *caps.detector, *session.model(), truth, clock, n,
                                 config.session.confidence_threshold);
}

}  // namespace objvoice::app
