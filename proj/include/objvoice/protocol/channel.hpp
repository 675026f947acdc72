#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "objvoice/protocol/endpoint.hpp"

namespace objvoice::protocol {

// Bidirectional byte stream carrying wand frames in one direction and
// control frames in the other.
class ByteChannel {
 public:
  virtual ~ByteChannel() = default;

  // Throws Error(TransportError) once the channel is closed.
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  // Waits up to `wait` for data and returns everything available; empty on
  // timeout or when the peer has closed.
  virtual std::vector<std::uint8_t> read(std::chrono::milliseconds wait) = 0;
  virtual void close() = 0;
  virtual bool is_open() const = 0;
};

// In-process pipe: bytes written to one end are read from the other.
std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>> make_pipe();

// Out-of-process carrier over a TCP socket.
class TcpChannel final : public ByteChannel {
 public:
  explicit TcpChannel(int fd) : fd_(fd) {}
  ~TcpChannel() override;
  TcpChannel(const TcpChannel&) = delete;
  TcpChannel& operator=(const TcpChannel&) = delete;

  // Throws Error(Unreachable) when nothing listens at the endpoint.
  static std::unique_ptr<TcpChannel> connect(const Endpoint& endpoint);

  void write(std::span<const std::uint8_t> bytes) override;
  std::vector<std::uint8_t> read(std::chrono::milliseconds wait) override;
  void close() override;
  bool is_open() const override { return fd_ >= 0; }

 private:
  int fd_;
};

class TcpListener {
 public:
  // Port 0 picks an ephemeral port; see port().
  explicit TcpListener(const Endpoint& bind);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  // Returns nullptr if no peer connects within `wait`.
  std::unique_ptr<TcpChannel> accept(std::chrono::milliseconds wait);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace objvoice::protocol
