#include "objvoice/devsim/wand.hpp"

#include <json.hpp>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::devsim {

using nlohmann::json;
using protocol::WandKind;

void WandScript::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const WandEvent& e = events[i];
    if (e.at_ms < 0) throw Error(Errc::ScriptInvalid, "negative event time");
    if (i > 0 && e.at_ms < events[i - 1].at_ms) {
      throw Error(Errc::ScriptInvalid, "event times must be non-decreasing");
    }
    const WandKind expected = i % 2 == 0 ? WandKind::TouchDown : WandKind::TouchUp;
    if (e.kind != expected) {
      throw Error(Errc::ScriptInvalid, "events must alternate TOUCH_DOWN/TOUCH_UP (event " +
                                           std::to_string(i) + ")");
    }
  }
}

WandScript WandScript::parse(std::string_view document) {
  const json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(Errc::ScriptInvalid, "wand script is not a JSON object");
  }
  WandScript script;
  try {
    for (const json& ej : doc.value("events", json::array())) {
      WandEvent e;
      e.at_ms = ej.at("at_ms").get<std::int64_t>();
      const auto kind = protocol::parse_wand_kind(ej.at("kind").get<std::string>());
      if (!kind) throw Error(Errc::ScriptInvalid, "unknown wand event kind");
      e.kind = *kind;
      e.say = ej.value("say", "");
      script.events.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ScriptInvalid, std::string("wand script: ") + e.what());
  }
  script.validate();
  return script;
}

WandScript WandScript::load(const std::filesystem::path& path) {
  return parse(util::read_text(path));
}

std::vector<std::pair<std::int64_t, protocol::WireFrame>> wand_schedule(const WandScript& script) {
  script.validate();
  std::vector<std::pair<std::int64_t, protocol::WireFrame>> out;
  std::uint16_t seq = 0;
  for (const auto& e : script.events) {
    out.emplace_back(e.at_ms, protocol::encode_wand_message({e.kind, seq++}));
  }
  return out;
}

VirtualWand::VirtualWand(WandScript script, protocol::ByteChannel& channel)
    : schedule_(wand_schedule(script)), channel_(channel) {}

std::size_t VirtualWand::emit_until(std::int64_t t_ms) {
  std::size_t written = 0;
  while (next_ < schedule_.size() && schedule_[next_].first <= t_ms) {
    channel_.write(schedule_[next_].second);
    ++next_;
    ++written;
  }
  return written;
}

std::optional<std::int64_t> VirtualWand::next_event_ms() const {
  if (finished()) return std::nullopt;
  return schedule_[next_].first;
}

void VirtualWand::run(VirtualClock& clock) {
  while (auto at = next_event_ms()) {
    const Micros t = std::chrono::milliseconds(*at);
    if (clock.now() < t) clock.set(t);
    emit_until(*at);
  }
}

void VirtualWand::poll_feedback(std::chrono::milliseconds wait) {
  const auto bytes = channel_.read(wait);
  for (const auto& msg : decoder_.feed(bytes)) {
    feedback_.push_back(msg);
    switch (msg.kind) {
      case protocol::ControlKind::RecordStarted:
        vibrating_ = true;
        ++started_;
        break;
      case protocol::ControlKind::VibrateOff:
        vibrating_ = false;
        break;
      case protocol::ControlKind::RecordRejected:
        ++rejected_;
        break;
    }
  }
}

void VirtualMicrophone::on_start(Micros at) {
  std::string text;
  for (const auto& e : script_.events) {
    if (Micros(std::chrono::milliseconds(e.at_ms)) > at) break;
    if (e.kind == WandKind::TouchDown) text = e.say;
  }
  set_utterance(std::move(text));
}

}  // namespace objvoice::devsim
