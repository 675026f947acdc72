#include "objvoice/protocol/channel.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <deque>
#include <mutex>

#include "objvoice/error.hpp"

namespace objvoice::protocol {

namespace {

struct PipeState {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> to_a;
  std::deque<std::uint8_t> to_b;
  bool closed = false;
};

class PipeEnd final : public ByteChannel {
 public:
  PipeEnd(std::shared_ptr<PipeState> state, bool is_a) : state_(std::move(state)), is_a_(is_a) {}
  ~PipeEnd() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    std::lock_guard lock(state_->mu);
    if (state_->closed) throw Error(Errc::TransportError, "pipe closed");
    auto& q = is_a_ ? state_->to_b : state_->to_a;
    q.insert(q.end(), bytes.begin(), bytes.end());
    state_->cv.notify_all();
  }

  std::vector<std::uint8_t> read(std::chrono::milliseconds wait) override {
    std::unique_lock lock(state_->mu);
    auto& q = is_a_ ? state_->to_a : state_->to_b;
    state_->cv.wait_for(lock, wait, [&] { return !q.empty() || state_->closed; });
    std::vector<std::uint8_t> out(q.begin(), q.end());
    q.clear();
    return out;
  }

  void close() override {
    std::lock_guard lock(state_->mu);
    state_->closed = true;
    state_->cv.notify_all();
  }

  bool is_open() const override {
    std::lock_guard lock(state_->mu);
    return !state_->closed;
  }

 private:
  std::shared_ptr<PipeState> state_;
  bool is_a_;
};

sockaddr_in resolve(const Endpoint& endpoint) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(endpoint.port);
  std::string host = endpoint.host == "localhost" ? "127.0.0.1" : endpoint.host;
  if (host.empty() || host == "*") host = "0.0.0.0";
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
      throw Error(Errc::Unreachable, "cannot resolve " + endpoint.host);
    }
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
  }
  return addr;
}

}  // namespace

std::pair<std::unique_ptr<ByteChannel>, std::unique_ptr<ByteChannel>> make_pipe() {
  auto state = std::make_shared<PipeState>();
  return {std::make_unique<PipeEnd>(state, true), std::make_unique<PipeEnd>(state, false)};
}

TcpChannel::~TcpChannel() { close(); }

std::unique_ptr<TcpChannel> TcpChannel::connect(const Endpoint& endpoint) {
  sockaddr_in addr = resolve(endpoint);
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error(Errc::TransportError, "socket() failed");
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw Error(Errc::Unreachable, "nothing listening at " + endpoint.to_string());
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return std::make_unique<TcpChannel>(fd);
}

void TcpChannel::write(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    if (fd_ < 0) throw Error(Errc::TransportError, "socket closed");
    ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) throw Error(Errc::TransportError, "send failed");
    sent += static_cast<std::size_t>(n);
  }
}

std::vector<std::uint8_t> TcpChannel::read(std::chrono::milliseconds wait) {
  if (fd_ < 0) return {};
  pollfd pfd{fd_, POLLIN, 0};
  if (::poll(&pfd, 1, static_cast<int>(wait.count())) <= 0) return {};
  std::vector<std::uint8_t> buf(4096);
  ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
  if (n <= 0) {
    close();
    return {};
  }
  buf.resize(static_cast<std::size_t>(n));
  return buf;
}

void TcpChannel::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener::TcpListener(const Endpoint& bind) {
  sockaddr_in addr = resolve(bind);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw Error(Errc::TransportError, "socket() failed");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      ::listen(fd_, 4) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(Errc::TransportError, "cannot listen on " + bind.to_string());
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpChannel> TcpListener::accept(std::chrono::milliseconds wait) {
  pollfd pfd{fd_, POLLIN, 0};
  if (::poll(&pfd, 1, static_cast<int>(wait.count())) <= 0) return nullptr;
  int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) return nullptr;
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return std::make_unique<TcpChannel>(fd);
}

}  // namespace objvoice::protocol
