#include "objvoice/orchestrator/events.hpp"

#include "objvoice/error.hpp"

namespace objvoice::orchestrator {

using nlohmann::ordered_json;

std::string SessionEvent::to_line() const {
  return ordered_json{{"type", type}, {"payload", payload}, {"seq", seq}}.dump() + "\n";
}

SessionEvent SessionEvent::from_line(std::string_view line) {
  const ordered_json doc = ordered_json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::ParseError, "event is not JSON");
  try {
    return SessionEvent{doc.at("type").get<std::string>(), doc.at("payload"),
                        doc.at("seq").get<std::uint64_t>()};
  } catch (const ordered_json::exception& e) {
    throw Error(Errc::ParseError, std::string("event: ") + e.what());
  }
}

void AudioShelf::put(std::uint64_t clip, std::vector<std::uint8_t> wav) {
  std::lock_guard lock(mu_);
  clips_[clip] = std::move(wav);
  while (clips_.size() > capacity_) clips_.erase(clips_.begin());
}

std::optional<std::vector<std::uint8_t>> AudioShelf::get(std::uint64_t clip) const {
  std::lock_guard lock(mu_);
  auto it = clips_.find(clip);
  if (it == clips_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t EventBus::publish(std::string type, ordered_json payload) {
  std::uint64_t seq;
  {
    std::lock_guard lock(mu_);
    seq = next_seq_++;
    log_.push_back(SessionEvent{std::move(type), std::move(payload), seq});
    while (log_.size() > backlog_) log_.pop_front();
  }
  cv_.notify_all();
  return seq;
}

std::vector<SessionEvent> EventBus::since(std::uint64_t after, std::chrono::milliseconds wait) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, wait, [&] { return next_seq_ - 1 > after; });
  std::vector<SessionEvent> out;
  for (const auto& e : log_) {
    if (e.seq > after) out.push_back(e);
  }
  return out;
}

std::uint64_t EventBus::last_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_ - 1;
}

}  // namespace objvoice::orchestrator
