#include "objvoice/protocol/frame.hpp"

#include <httplib.h>

#include "objvoice/error.hpp"

namespace objvoice::protocol {

void validate_frame(const ScopeFrame& frame, bool device_sourced) {
  if (device_sourced && (frame.width != kDeviceFrameSide || frame.height != kDeviceFrameSide)) {
    throw Error(Errc::MalformedFrame, "device frames are 320x320, got " +
                                          std::to_string(frame.width) + "x" +
                                          std::to_string(frame.height));
  }
  if (frame.width == 0 || frame.height == 0) throw Error(Errc::MalformedFrame, "zero dimension");
  const std::size_t expected = static_cast<std::size_t>(frame.width) * frame.height * 3;
  if (frame.pixels.size() != expected) {
    throw Error(Errc::MalformedFrame, "pixel buffer has " + std::to_string(frame.pixels.size()) +
                                          " bytes, expected " + std::to_string(expected));
  }
}

std::vector<std::uint8_t> encode_frame(const ScopeFrame& frame) {
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + frame.pixels.size());
  const std::uint32_t s = frame.sequence;
  out.push_back(static_cast<std::uint8_t>(s >> 24));
  out.push_back(static_cast<std::uint8_t>(s >> 16));
  out.push_back(static_cast<std::uint8_t>(s >> 8));
  out.push_back(static_cast<std::uint8_t>(s));
  out.push_back(static_cast<std::uint8_t>(frame.width >> 8));
  out.push_back(static_cast<std::uint8_t>(frame.width));
  out.push_back(static_cast<std::uint8_t>(frame.height >> 8));
  out.push_back(static_cast<std::uint8_t>(frame.height));
  out.insert(out.end(), frame.pixels.begin(), frame.pixels.end());
  return out;
}

ScopeFrame decode_frame(std::span<const std::uint8_t> payload, std::int64_t timestamp_ms) {
  if (payload.size() < kFrameHeaderBytes) throw Error(Errc::MalformedFrame, "short header");
  ScopeFrame frame;
  frame.sequence = (std::uint32_t{payload[0]} << 24) | (std::uint32_t{payload[1]} << 16) |
                   (std::uint32_t{payload[2]} << 8) | std::uint32_t{payload[3]};
  frame.width = static_cast<std::uint16_t>((payload[4] << 8) | payload[5]);
  frame.height = static_cast<std::uint16_t>((payload[6] << 8) | payload[7]);
  frame.timestamp_ms = timestamp_ms;
  frame.pixels.assign(payload.begin() + kFrameHeaderBytes, payload.end());
  validate_frame(frame);
  return frame;
}

HttpFrameClient::HttpFrameClient(Endpoint endpoint, const Clock& clock,
                                 std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), clock_(&clock), timeout_(timeout) {}

ScopeFrame HttpFrameClient::fetch_frame() {
  httplib::Client cli(endpoint_.host, endpoint_.port);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_ + std::chrono::milliseconds(250));
  // Leave the server some headroom under our own deadline.
  const auto wait_ms = std::max<long long>(timeout_.count() - 100, 0);
  std::string path = "/frame?wait_ms=" + std::to_string(wait_ms);
  if (last_) path += "&after=" + std::to_string(*last_);

  auto res = cli.Get(path);
  if (!res) {
    switch (res.error()) {
      case httplib::Error::Read:
      case httplib::Error::ConnectionTimeout:
        throw Error(Errc::Timeout, "no frame from " + endpoint_.to_string());
      default:
        throw Error(Errc::Unreachable, endpoint_.to_string() + ": " + httplib::to_string(res.error()));
    }
  }
  if (res->status == 204) throw Error(Errc::Timeout, "no new frame within " + std::to_string(timeout_.count()) + " ms");
  if (res->status == 410) throw Error(Errc::SourceLost, "frame stream ended");
  if (res->status != 200) {
    throw Error(Errc::Unreachable, "frame server answered " + std::to_string(res->status));
  }
  const auto* data = reinterpret_cast<const std::uint8_t*>(res->body.data());
  ScopeFrame frame = decode_frame(std::span(data, res->body.size()), whole_ms(clock_->now()));
  if (last_ && frame.sequence <= *last_) {
    throw Error(Errc::MalformedFrame, "sequence did not advance");
  }
  last_ = frame.sequence;
  return frame;
}

ScopeFrame fetch_frame(const Endpoint& endpoint, const Clock& clock,
                       std::chrono::milliseconds timeout) {
  HttpFrameClient client(endpoint, clock, timeout);
  return client.fetch_frame();
}

struct FrameServer::Impl {
  httplib::Server server;
  std::thread thread;
  std::mutex mu;
  std::condition_variable cv;
  std::optional<ScopeFrame> latest;
  std::vector<std::uint8_t> latest_wire;
  Producer producer;
  bool ended = false;
  bool stopping = false;

  // Caller holds mu.
  void install(ScopeFrame frame) {
    latest_wire = encode_frame(frame);
    latest = std::move(frame);
    cv.notify_all();
  }
};

FrameServer::FrameServer(const Endpoint& bind) : impl_(std::make_unique<Impl>()), host_(bind.host) {
  impl_->server.Get("/frame", [this](const httplib::Request& req, httplib::Response& res) {
    Impl& s = *impl_;
    std::optional<std::uint32_t> after;
    if (req.has_param("after")) after = static_cast<std::uint32_t>(std::stoul(req.get_param_value("after")));
    long long wait_ms = 1000;
    if (req.has_param("wait_ms")) wait_ms = std::stoll(req.get_param_value("wait_ms"));

    std::unique_lock lock(s.mu);
    auto fresh = [&] { return s.latest && (!after || s.latest->sequence > *after); };
    if (!fresh() && s.producer && !s.ended) {
      auto next = s.producer();
      if (next) {
        s.install(std::move(*next));
      } else {
        s.ended = true;
      }
    }
    if (!fresh()) {
      s.cv.wait_for(lock, std::chrono::milliseconds(wait_ms),
                    [&] { return fresh() || s.ended || s.stopping; });
    }
    if (fresh()) {
      res.set_content(reinterpret_cast<const char*>(s.latest_wire.data()), s.latest_wire.size(),
                      "application/octet-stream");
    } else if (s.ended) {
      res.status = 410;
    } else {
      res.status = 204;
    }
  });
  int port = bind.port == 0 ? impl_->server.bind_to_any_port(bind.host == "localhost" ? "127.0.0.1" : bind.host)
                            : (impl_->server.bind_to_port(bind.host, bind.port) ? bind.port : -1);
  if (port <= 0) throw Error(Errc::TransportError, "cannot bind frame server to " + bind.to_string());
  port_ = static_cast<std::uint16_t>(port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

FrameServer::~FrameServer() { stop(); }

Endpoint FrameServer::endpoint() const {
  return Endpoint{host_ == "0.0.0.0" || host_.empty() ? "127.0.0.1" : host_, port_};
}

void FrameServer::publish(ScopeFrame frame) {
  std::lock_guard lock(impl_->mu);
  impl_->install(std::move(frame));
}

void FrameServer::set_producer(Producer producer) {
  std::lock_guard lock(impl_->mu);
  impl_->producer = std::move(producer);
}

void FrameServer::end_stream() {
  std::lock_guard lock(impl_->mu);
  impl_->ended = true;
  impl_->cv.notify_all();
}

void FrameServer::stop() {
  if (!impl_) return;
  {
    std::lock_guard lock(impl_->mu);
    impl_->stopping = true;
    impl_->cv.notify_all();
  }
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace objvoice::protocol
