#include "objvoice/orchestrator/api_server.hpp"

#include <httplib.h>

#include <thread>

#include "objvoice/error.hpp"

namespace objvoice::orchestrator {

using nlohmann::json;

Command Command::parse(std::string_view document) {
  const json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::ParseError, "command is not a JSON object");
  try {
    Command c;
    const std::string type = doc.at("type").get<std::string>();
    if (type == "WAND") {
      c.kind = Kind::Wand;
      auto kind = protocol::parse_wand_kind(doc.at("kind").get<std::string>());
      if (!kind) throw Error(Errc::ParseError, "unknown wand kind");
      c.wand = *kind;
    } else if (type == "PERSONA_EDIT") {
      c.kind = Kind::PersonaEdit;
      c.class_id = doc.at("class_id").get<std::uint32_t>();
      c.set = doc.at("set").get<std::map<std::string, std::string>>();
    } else if (type == "SAY") {
      c.kind = Kind::Say;
      c.text = doc.at("text").get<std::string>();
    } else {
      throw Error(Errc::ParseError, "unknown command type " + type);
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("command: ") + e.what());
  }
}

void CommandQueue::push(Command command) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(command));
  }
  cv_.notify_one();
}

std::optional<Command> CommandQueue::pop(std::chrono::milliseconds wait) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, wait, [&] { return !queue_.empty(); })) return std::nullopt;
  Command c = std::move(queue_.front());
  queue_.pop_front();
  return c;
}

struct ApiServer::Impl {
  httplib::Server server;
  std::thread thread;
};

ApiServer::ApiServer(const protocol::Endpoint& bind, EventBus& events, CommandQueue& commands)
    : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  server.Get("/events", [&events](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t after = 0;
    long long wait_ms = 0;
    try {
      if (req.has_param("after")) after = std::stoull(req.get_param_value("after"));
      if (req.has_param("wait_ms")) wait_ms = std::stoll(req.get_param_value("wait_ms"));
    } catch (const std::exception&) {
      res.status = 400;
      return;
    }
    std::string body;
    for (const auto& e : events.since(after, std::chrono::milliseconds(wait_ms))) body += e.to_line();
    res.set_content(body, "application/x-ndjson");
  });
  server.Post("/command", [&commands](const httplib::Request& req, httplib::Response& res) {
    try {
      commands.push(Command::parse(req.body));
      res.status = 202;
      res.set_content(R"({"accepted":true})", "application/json");
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  server.Get(R"(/audio/(\d+)\.wav)", [&events](const httplib::Request& req, httplib::Response& res) {
    const auto wav = events.audio().get(std::stoull(req.matches[1]));
    if (!wav) {
      res.status = 404;
      return;
    }
    res.set_content(reinterpret_cast<const char*>(wav->data()), wav->size(), "audio/wav");
  });

  const std::string host = bind.host == "localhost" ? "127.0.0.1" : bind.host;
  const int port = bind.port == 0 ? server.bind_to_any_port(host)
                                  : (server.bind_to_port(host, bind.port) ? bind.port : -1);
  if (port <= 0) throw Error(Errc::TransportError, "cannot bind session API to " + bind.to_string());
  port_ = static_cast<std::uint16_t>(port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  server.wait_until_ready();
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace objvoice::orchestrator
