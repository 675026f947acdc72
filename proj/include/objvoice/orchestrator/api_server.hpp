#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "objvoice/orchestrator/events.hpp"
#include "objvoice/protocol/endpoint.hpp"
#include "objvoice/protocol/wand.hpp"

namespace objvoice::orchestrator {

// A request from a UI, equivalent to a wand event, a persona edit or
// (standing in for speech) the text of the next recording.
struct Command {
  enum class Kind { Wand, PersonaEdit, Say };

  Kind kind = Kind::Wand;
  protocol::WandKind wand = protocol::WandKind::TouchDown;
  std::uint32_t class_id = 0;
  std::map<std::string, std::string> set;
  std::string text;

  // {"type":"WAND","kind":"TOUCH_DOWN"} | {"type":"PERSONA_EDIT","class_id":0,
  // "set":{"name":"Cuppie"}} | {"type":"SAY","text":"hello"}
  // Throws Error(ParseError).
  static Command parse(std::string_view document);
};

class CommandQueue {
 public:
  void push(Command command);
  std::optional<Command> pop(std::chrono::milliseconds wait = std::chrono::milliseconds(0));

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Command> queue_;
};

// Session API over HTTP:
//   GET  /events?after=<seq>&wait_ms=<ms>  line-delimited events after seq
//   POST /command                           queue a Command (202, or 400)
//   GET  /audio/<n>.wav                     a synthesized clip
class ApiServer {
 public:
  ApiServer(const protocol::Endpoint& bind, EventBus& events, CommandQueue& commands);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t port_ = 0;
};

}  // namespace objvoice::orchestrator
