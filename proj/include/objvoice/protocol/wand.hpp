#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace objvoice::protocol {

// Wand <-> engine framing. Every frame is exactly five bytes:
//
//   byte0    magic 0xA5
//   byte1    kind code
//   byte2-3  sequence, big-endian
//   byte4    XOR of bytes 0..3
//
// Wand events use kind codes 0x01/0x02; engine replies (control messages)
// reuse the same framing with codes in the 0x8x range.
inline constexpr std::uint8_t kMagic = 0xA5;
inline constexpr std::size_t kFrameBytes = 5;

using WireFrame = std::array<std::uint8_t, kFrameBytes>;

enum class WandKind : std::uint8_t {
  TouchDown = 0x01,
  TouchUp = 0x02,
};

enum class ControlKind : std::uint8_t {
  RecordStarted = 0x81,  // also switches the vibration motor on
  RecordRejected = 0x82,
  VibrateOff = 0x83,
};

struct WandMessage {
  WandKind kind = WandKind::TouchDown;
  std::uint16_t sequence = 0;

  friend bool operator==(const WandMessage&, const WandMessage&) = default;
};

struct ControlMessage {
  ControlKind kind = ControlKind::RecordRejected;
  std::uint16_t sequence = 0;  // echo of the triggering wand sequence

  friend bool operator==(const ControlMessage&, const ControlMessage&) = default;
};

std::string_view to_string(WandKind kind);
std::string_view to_string(ControlKind kind);
std::optional<WandKind> parse_wand_kind(std::string_view name);

WireFrame encode_wand_message(const WandMessage& msg);
// Throws Error with Truncated, BadMagic, BadChecksum or UnknownKind.
// Only the first five bytes are inspected.
WandMessage decode_wand_message(std::span<const std::uint8_t> bytes);

WireFrame encode_control_message(const ControlMessage& msg);
ControlMessage decode_control_message(std::span<const std::uint8_t> bytes);

// Reassembles frames from an unframed byte stream. Bytes that cannot start a
// valid frame are skipped one at a time until the stream resynchronizes.
template <typename Message>
class StreamDecoder {
 public:
  std::vector<Message> feed(std::span<const std::uint8_t> bytes);

  std::size_t rejected_bytes() const { return rejected_; }
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t rejected_ = 0;
};

using WandStreamDecoder = StreamDecoder<WandMessage>;
using ControlStreamDecoder = StreamDecoder<ControlMessage>;

extern template class StreamDecoder<WandMessage>;
extern template class StreamDecoder<ControlMessage>;

}  // namespace objvoice::protocol
