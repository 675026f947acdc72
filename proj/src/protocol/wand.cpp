#include "objvoice/protocol/wand.hpp"

#include "objvoice/error.hpp"

namespace objvoice::protocol {

namespace {

WireFrame frame(std::uint8_t kind, std::uint16_t seq) {
  WireFrame out{kMagic, kind, static_cast<std::uint8_t>(seq >> 8),
                static_cast<std::uint8_t>(seq & 0xFF), 0};
  out[4] = out[0] ^ out[1] ^ out[2] ^ out[3];
  return out;
}

// Returns (kind byte, sequence) after validating framing.
std::pair<std::uint8_t, std::uint16_t> unframe(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameBytes) throw Error(Errc::Truncated, "need 5 bytes");
  if (bytes[0] != kMagic) throw Error(Errc::BadMagic, "first byte is not 0xA5");
  if ((bytes[0] ^ bytes[1] ^ bytes[2] ^ bytes[3]) != bytes[4]) {
    throw Error(Errc::BadChecksum, "xor mismatch");
  }
  return {bytes[1], static_cast<std::uint16_t>((bytes[2] << 8) | bytes[3])};
}

template <typename Message>
Message decode(std::span<const std::uint8_t> bytes);

template <>
WandMessage decode<WandMessage>(std::span<const std::uint8_t> bytes) {
  return decode_wand_message(bytes);
}

template <>
ControlMessage decode<ControlMessage>(std::span<const std::uint8_t> bytes) {
  return decode_control_message(bytes);
}

}  // namespace

std::string_view to_string(WandKind kind) {
  switch (kind) {
    case WandKind::TouchDown: return "TOUCH_DOWN";
    case WandKind::TouchUp: return "TOUCH_UP";
  }
  return "?";
}

std::string_view to_string(ControlKind kind) {
  switch (kind) {
    case ControlKind::RecordStarted: return "RECORD_STARTED";
    case ControlKind::RecordRejected: return "RECORD_REJECTED";
    case ControlKind::VibrateOff: return "VIBRATE_OFF";
  }
  return "?";
}

std::optional<WandKind> parse_wand_kind(std::string_view name) {
  if (name == "TOUCH_DOWN") return WandKind::TouchDown;
  if (name == "TOUCH_UP") return WandKind::TouchUp;
  return std::nullopt;
}

WireFrame encode_wand_message(const WandMessage& msg) {
  return frame(static_cast<std::uint8_t>(msg.kind), msg.sequence);
}

WandMessage decode_wand_message(std::span<const std::uint8_t> bytes) {
  auto [kind, seq] = unframe(bytes);
  if (kind != static_cast<std::uint8_t>(WandKind::TouchDown) &&
      kind != static_cast<std::uint8_t>(WandKind::TouchUp)) {
    throw Error(Errc::UnknownKind, "wand kind " + std::to_string(kind));
  }
  return WandMessage{static_cast<WandKind>(kind), seq};
}

WireFrame encode_control_message(const ControlMessage& msg) {
  return frame(static_cast<std::uint8_t>(msg.kind), msg.sequence);
}

ControlMessage decode_control_message(std::span<const std::uint8_t> bytes) {
  auto [kind, seq] = unframe(bytes);
  switch (static_cast<ControlKind>(kind)) {
    case ControlKind::RecordStarted:
    case ControlKind::RecordRejected:
    case ControlKind::VibrateOff:
      return ControlMessage{static_cast<ControlKind>(kind), seq};
  }
  throw Error(Errc::UnknownKind, "control kind " + std::to_string(kind));
}

template <typename Message>
std::vector<Message> StreamDecoder<Message>::feed(std::span<const std::uint8_t> bytes) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
  std::vector<Message> out;
  std::size_t pos = 0;
  while (buffer_.size() - pos >= kFrameBytes) {
    try {
      out.push_back(decode<Message>(std::span(buffer_).subspan(pos, kFrameBytes)));
      pos += kFrameBytes;
    } catch (const Error&) {
      ++pos;
      ++rejected_;
    }
  }
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
  return out;
}

template class StreamDecoder<WandMessage>;
template class StreamDecoder<ControlMessage>;

}  // namespace objvoice::protocol
