#include "objvoice/orchestrator/session.hpp"

#include <algorithm>
#include <cmath>

#include "objvoice/dialogue/segment.hpp"
#include "objvoice/error.hpp"
#include "objvoice/persona/generate.hpp"
#include "objvoice/util/files.hpp"
#include "objvoice/vision/dataset.hpp"

namespace objvoice::orchestrator {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::optional<std::string> read_if_exists(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  return util::read_text(path);
}

}  // namespace

Session::Session(fs::path root, backends::CapabilitySet capabilities, Clock& clock,
                 SessionConfig config, EventBus* events)
    : workspace_{std::move(root)},
      caps_(std::move(capabilities)),
      clock_(clock),
      config_(std::move(config)),
      events_(events),
      personas_(workspace_.root),
      histories_(workspace_.root) {
  if (!caps_.complete()) {
    throw Error(Errc::InvalidArgument, "capabilities missing: " + join(caps_.missing(), ", "));
  }
  registry_ = workspace_.load_registry();
  model_ = workspace_.load_model();
}

void Session::emit(std::string type, ordered_json payload) {
  if (events_ != nullptr) events_->publish(std::move(type), std::move(payload));
}

// ---------------------------------------------------------------- acquaintance

ObjectProfile Session::acquaint(protocol::FrameSource& source, std::string label,
                                persona::Language language) {
  if (state_.phase != Phase::Idle && state_.phase != Phase::Tracking) {
    throw Error(Errc::InvalidState, "cannot get acquainted while " + to_string(state_));
  }
  if (label.empty()) throw Error(Errc::InvalidArgument, "object label is empty");
  const std::uint32_t class_id = registry_.next_class_id();
  std::vector<std::string> names = model_ ? model_->class_names : std::vector<std::string>{};
  if (names.size() != class_id) {
    throw Error(Errc::InvalidState, "model classes do not match the registry");
  }
  names.push_back(label);

  auto frames = vision::collect_frames(source, config_.acquaintance_frames);
  auto samples = vision::annotate_frames(frames, *caps_.segmenter, class_id);
  vision::Dataset addition =
      vision::build_dataset(std::move(samples), names, config_.dataset_seed + class_id);

  vision::Dataset all;
  for (std::uint32_t id = 0; id < class_id; ++id) {
    vision::Dataset earlier = vision::load_annotations(workspace_.dataset_dir(id));
    all = id == 0 ? std::move(earlier) : vision::merge_datasets(all, earlier);
  }
  all = class_id == 0 ? addition : vision::merge_datasets(all, addition);

  const vision::ModelHandle* prev = model_ ? &*model_ : nullptr;
  vision::ModelHandle model = vision::register_class(all, *caps_.trainer, prev, config_.train);
  const bool fresh_artifacts = !model.location.empty() && (!prev || prev->location != model.location);

  const auto old_model_doc = read_if_exists(workspace_.model_path());
  const fs::path staging = workspace_.datasets_dir() / (".staging-" + std::to_string(class_id));
  const fs::path dataset_dir = workspace_.dataset_dir(class_id);
  bool persona_written = false;
  try {
    const persona::Persona persona =
        persona::generate_persona(frames.front(), language, *caps_.persona_generator);

    ObjectProfile profile;
    profile.class_id = class_id;
    profile.label = std::move(label);
    profile.persona_path = personas_.path_for(class_id).lexically_relative(workspace_.root);
    profile.history_path = histories_.path_for(class_id).lexically_relative(workspace_.root);
    profile.registered_at_ms = whole_ms(clock_.now());
    ObjectRegistry next = registry_;
    next.add(profile);

    fs::remove_all(staging);
    vision::write_annotations(addition, staging);
    fs::remove_all(dataset_dir);
    fs::rename(staging, dataset_dir);
    personas_.store(class_id, persona);
    persona_written = true;
    workspace_.save_model(model);
    workspace_.save_registry(next);

    next.set_active(registry_.active());
    registry_ = std::move(next);
    model_ = std::move(model);
    emit("STATE", {{"event", "ACQUAINTED"},
                   {"class_id", class_id},
                   {"label", profile.label},
                   {"name", persona.name},
                   {"state", to_string(state_)}});
    return profile;
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    fs::remove_all(dataset_dir, ec);
    if (persona_written) personas_.remove(class_id);
    if (old_model_doc) {
      util::write_atomic(workspace_.model_path(), *old_model_doc);
    } else {
      fs::remove(workspace_.model_path(), ec);
    }
    if (fresh_artifacts) fs::remove_all(model.location, ec);
    throw;
  }
}

// ---------------------------------------------------------------- tracking

std::vector<vision::Detection> Session::handle_frame(const protocol::ScopeFrame& frame) {
  std::vector<vision::Detection> detections;
  if (model_) {
    try {
      detections = vision::detect(frame, *caps_.detector, *model_, clock_, config_.confidence_threshold);
    } catch (const Error&) {
      detections.clear();
    }
  }
  std::erase_if(detections, [&](const auto& d) { return !registry_.contains(d.class_id); });
  if (!detections.empty()) {
    ordered_json list = ordered_json::array();
    for (const auto& d : detections) {
      list.push_back({{"class_id", d.class_id},
                      {"bbox", {d.bbox.cx, d.bbox.cy, d.bbox.w, d.bbox.h}},
                      {"confidence", d.confidence},
                      {"latency_ms", d.latency_ms}});
    }
    emit("DETECTION", {{"frame", frame.sequence}, {"detections", std::move(list)}});
  }
  observe(detections);
  return detections;
}

std::optional<std::uint32_t> Session::pick_active(std::span<const vision::Detection> detections) const {
  const vision::Detection* best = nullptr;
  double best_dist = 0.0;
  for (const auto& d : detections) {
    if (!registry_.contains(d.class_id) || d.confidence < config_.confidence_threshold) continue;
    const double dist = std::hypot(d.bbox.cx - 0.5, d.bbox.cy - 0.5);
    if (best == nullptr || d.confidence > best->confidence ||
        (d.confidence == best->confidence &&
         (dist < best_dist || (dist == best_dist && d.class_id < best->class_id)))) {
      best = &d;
      best_dist = dist;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->class_id;
}

bool Session::in_view() const {
  return last_seen_ && clock_.now() - *last_seen_ < config_.grace_period;
}

void Session::observe(std::span<const vision::Detection> detections) {
  if (auto active = pick_active(detections)) {
    last_seen_ = clock_.now();
    apply(Event{EventKind::ObjectSeen, *active});
  } else if (state_.phase == Phase::Tracking && !in_view()) {
    apply(Event{EventKind::ObjectLost});
  }
}

void Session::focus(std::uint32_t class_id) {
  registry_.get(class_id);
  last_seen_ = clock_.now();
  apply(Event{EventKind::ObjectSeen, class_id});
}

// ---------------------------------------------------------------- push-to-talk

void Session::apply(const Event& event, dialogue::Recorder* mic, WandOutcome* outcome) {
  Transition t = step(state_, event);
  const SessionState before = state_;
  state_ = t.next;
  registry_.set_active(state_.class_id);

  switch (t.effect) {
    case Effect::StartRecording:
      if (mic == nullptr) throw Error(Errc::InvalidState, "no microphone");
      mic->start(clock_.now());
      recording_since_ = clock_.now();
      recording_seq_ = event.wand_seq;
      break;
    case Effect::StopRecording:
      if (mic == nullptr) throw Error(Errc::InvalidState, "no microphone");
      pending_audio_ = mic->stop(clock_.now());
      recording_since_.reset();
      break;
    case Effect::Activate:
    case Effect::None:
      break;
  }
  for (const auto& c : t.controls) {
    emit("CONTROL", {{"kind", protocol::to_string(c.kind)}, {"seq", c.sequence}});
    if (outcome != nullptr) outcome->controls.push_back(c);
  }
  if (state_ != before) {
    ordered_json payload = {{"state", to_string(state_)},
                            {"phase", to_string(state_.phase)},
                            {"class_id", state_.class_id ? ordered_json(*state_.class_id) : ordered_json()}};
    if (t.effect == Effect::Activate && personas_.contains(*state_.class_id)) {
      payload["name"] = personas_.load(*state_.class_id).name;
    }
    emit("STATE", std::move(payload));
  }
}

WandOutcome Session::handle_wand(const protocol::WandMessage& msg, dialogue::Recorder& mic) {
  WandOutcome outcome;
  const EventKind kind =
      msg.kind == protocol::WandKind::TouchDown ? EventKind::TouchDown : EventKind::TouchUp;
  apply(Event{kind, 0, msg.sequence}, &mic, &outcome);
  outcome.cycle_ready = pending_audio_.has_value();
  return outcome;
}

WandOutcome Session::tick(dialogue::Recorder& mic) {
  WandOutcome outcome;
  if (state_.phase == Phase::Recording && recording_since_ &&
      clock_.now() - *recording_since_ >= config_.max_recording) {
    apply(Event{EventKind::RecordingTimeout, 0, recording_seq_}, &mic, &outcome);
  } else if (state_.phase == Phase::Tracking && !in_view()) {
    apply(Event{EventKind::ObjectLost}, &mic, &outcome);
  }
  outcome.cycle_ready = pending_audio_.has_value();
  return outcome;
}

CycleReport Session::complete_cycle(dialogue::PlaybackSink* sink) {
  if (!pending_audio_ || state_.phase != Phase::Transcribing) {
    throw Error(Errc::InvalidState, "no finished recording");
  }
  dialogue::PcmAudio audio = std::move(*pending_audio_);
  pending_audio_.reset();
  const std::uint32_t class_id = *state_.class_id;
  try {
    return bond(audio, class_id, sink, true);
  } catch (const std::exception& e) {
    apply(Event{EventKind::Failure});
    CycleReport report;
    report.class_id = class_id;
    report.error = e.what();
    report.at_ms = whole_ms(clock_.now());
    emit("STATE", {{"state", to_string(state_)}, {"error", report.error}});
    return report;
  }
}

CycleReport Session::run_bonding_cycle(const dialogue::PcmAudio& audio, std::uint32_t class_id,
                                       dialogue::PlaybackSink* sink) {
  return bond(audio, class_id, sink, false);
}

CycleReport Session::bond(const dialogue::PcmAudio& audio, std::uint32_t class_id,
                          dialogue::PlaybackSink* sink, bool drive_state) {
  registry_.get(class_id);
  const persona::Persona persona = personas_.load(class_id);
  dialogue::ChatHistory history = histories_.load(class_id);

  CycleReport report;
  report.class_id = class_id;
  report.object_name = persona.name;
  report.at_ms = whole_ms(clock_.now());

  try {
    report.user_text = dialogue::transcribe(audio, *caps_.transcriber, persona.language);
  } catch (const Error& e) {
    if (e.code() != Errc::EmptyTranscript) throw;
    report.skipped = true;
    if (drive_state) apply(Event{EventKind::TranscriptEmpty});
    return report;
  }
  if (drive_state) apply(Event{EventKind::TranscriptReady});

  dialogue::ChatRequest request =
      dialogue::build_chat_request(persona, history, report.user_text, config_.marker);
  request.temperature = config_.temperature;
  request.max_tokens = config_.max_tokens;
  try {
    report.reply = caps_.chat->complete(request);
  } catch (const std::exception& e) {
    throw Error(Errc::BackendFailure, std::string("chat: ") + e.what());
  }
  report.segments = dialogue::segment_response(report.reply, config_.marker).segments;
  if (report.segments.empty()) throw Error(Errc::BackendFailure, "chat reply is empty");

  // The reply is complete: this is the point of no return for memory.
  const std::string spoken = join(report.segments, " ");
  history.append({dialogue::Role::User, report.user_text, report.at_ms});
  history.append({dialogue::Role::Object, spoken, report.at_ms});
  histories_.save(class_id, history);
  emit("TRANSCRIPT", {{"class_id", class_id}, {"role", "USER"}, {"text", report.user_text}});
  emit("TRANSCRIPT", {{"class_id", class_id},
                      {"role", "OBJECT"},
                      {"name", persona.name},
                      {"text", spoken}});
  if (drive_state) apply(Event{EventKind::ReplyReady});

  auto synthesis = dialogue::synthesize_ordered(report.segments, persona.voice, persona.language,
                                                *caps_.synthesizer, config_.parallelism, clock_,
                                                sink);
  report.clips = std::move(synthesis.clips);
  report.speech_ok = synthesis.ok();
  if (!report.speech_ok) report.error = synthesis.failure;

  report.metrics.input_duration_ms = audio.duration_ms();
  for (const auto& clip : report.clips) {
    report.metrics.synth_ms.push_back(clip.synth_ms);
    report.metrics.rtf.push_back(dialogue::rtf(clip));
    const std::uint64_t n = clips_emitted_++;
    if (events_ != nullptr) {
      dialogue::PcmAudio out;
      out.samples = clip.samples;
      events_->audio().put(n, dialogue::encode_wav(out));
    }
    emit("AUDIO_SEGMENT", {{"class_id", class_id},
                           {"segment", clip.segment_index},
                           {"text", report.segments[clip.segment_index]},
                           {"duration_ms", clip.duration_ms()},
                           {"synth_ms", clip.synth_ms},
                           {"url", "/audio/" + std::to_string(n) + ".wav"}});
  }
  metrics_.push_back(report.metrics);
  if (drive_state) apply(Event{EventKind::SpeechDone, 0, 0, in_view()});
  return report;
}

persona::Persona Session::edit_persona(std::uint32_t class_id,
                                       const std::map<std::string, std::string>& overrides) {
  registry_.get(class_id);
  const persona::Persona edited = persona::edit_persona(personas_.load(class_id), overrides);
  personas_.store(class_id, edited);
  emit("STATE", {{"event", "PERSONA"},
                 {"class_id", class_id},
                 {"persona", ordered_json::parse(persona::to_document(edited))}});
  return edited;
}

}  // namespace objvoice::orchestrator
