#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace objvoice::protocol {

// "host:port" address of a device or service.
struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  // Throws Error(InvalidArgument) when the text is not host:port.
  static Endpoint parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

}  // namespace objvoice::protocol
