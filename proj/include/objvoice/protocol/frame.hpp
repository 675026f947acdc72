#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "objvoice/clock.hpp"
#include "objvoice/protocol/endpoint.hpp"

namespace objvoice::protocol {

inline constexpr std::uint16_t kDeviceFrameSide = 320;
inline constexpr std::size_t kFrameHeaderBytes = 8;

// One RGB8 image from the scope, row-major.
struct ScopeFrame {
  std::uint32_t sequence = 0;
  std::int64_t timestamp_ms = 0;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<std::uint8_t> pixels;

  const std::uint8_t* pixel(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)) * 3;
  }
};

// Throws Error(MalformedFrame) if the buffer size disagrees with the
// dimensions, or (for device frames) the dimensions are not 320x320.
void validate_frame(const ScopeFrame& frame, bool device_sourced = true);

// Wire payload: u32 sequence, u16 width, u16 height (all big-endian), then
// width*height*3 raw bytes. The timestamp is assigned by the receiver.
std::vector<std::uint8_t> encode_frame(const ScopeFrame& frame);
ScopeFrame decode_frame(std::span<const std::uint8_t> payload, std::int64_t timestamp_ms);

// Anything frames can be pulled from: a remote scope, a simulated scope.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  // Blocks until a frame newer than the previous one is available.
  virtual ScopeFrame next_frame() = 0;
};

// Pull client for a scope's frame server. Each fetch asks for a frame newer
// than the last one delivered; frames produced in between are skipped.
class HttpFrameClient final : public FrameSource {
 public:
  HttpFrameClient(Endpoint endpoint, const Clock& clock,
                  std::chrono::milliseconds timeout = std::chrono::milliseconds(1000));

  // Throws Error with Unreachable, Timeout, MalformedFrame or SourceLost.
  ScopeFrame fetch_frame();
  ScopeFrame next_frame() override { return fetch_frame(); }

  std::optional<std::uint32_t> last_sequence() const { return last_; }

 private:
  Endpoint endpoint_;
  const Clock* clock_;
  std::chrono::milliseconds timeout_;
  std::optional<std::uint32_t> last_;
};

// One-shot fetch of the most recent frame.
ScopeFrame fetch_frame(const Endpoint& endpoint, const Clock& clock,
                       std::chrono::milliseconds timeout = std::chrono::milliseconds(1000));

// Serves the latest published frame at GET /frame?after=<seq>&wait_ms=<ms>.
// Only the newest frame is kept; a request waits (bounded by wait_ms) for a
// frame newer than `after`, and gets 204 if none arrives. With an on-demand
// producer installed, a request that is ahead of the latest frame pulls the
// next frame from the producer instead of waiting; a producer returning
// nullopt marks the end of the stream (410).
class FrameServer {
 public:
  using Producer = std::function<std::optional<ScopeFrame>()>;

  explicit FrameServer(const Endpoint& bind);
  ~FrameServer();
  FrameServer(const FrameServer&) = delete;
  FrameServer& operator=(const FrameServer&) = delete;

  std::uint16_t port() const { return port_; }
  Endpoint endpoint() const;

  void publish(ScopeFrame frame);
  void set_producer(Producer producer);
  void end_stream();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t port_ = 0;
  std::string host_;
};

}  // namespace objvoice::protocol
