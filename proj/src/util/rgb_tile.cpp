#include "objvoice/util/rgb_tile.hpp"

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"

namespace objvoice::util {

std::vector<std::uint8_t> encode_tile(const RgbTile& tile) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + tile.rgb.size());
  out.push_back(static_cast<std::uint8_t>(tile.width >> 8));
  out.push_back(static_cast<std::uint8_t>(tile.width));
  out.push_back(static_cast<std::uint8_t>(tile.height >> 8));
  out.push_back(static_cast<std::uint8_t>(tile.height));
  out.insert(out.end(), tile.rgb.begin(), tile.rgb.end());
  return out;
}

RgbTile decode_tile(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(Errc::ParseError, "tile header truncated");
  RgbTile tile;
  tile.width = (bytes[0] << 8) | bytes[1];
  tile.height = (bytes[2] << 8) | bytes[3];
  const std::size_t expected = static_cast<std::size_t>(tile.width) * tile.height * 3;
  if (tile.width == 0 || tile.height == 0 || bytes.size() - 4 != expected) {
    throw Error(Errc::ParseError, "tile payload does not match its header");
  }
  tile.rgb.assign(bytes.begin() + 4, bytes.end());
  return tile;
}

RgbTile read_tile(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return decode_tile(bytes);
}

void write_tile(const std::filesystem::path& path, const RgbTile& tile) {
  const auto bytes = encode_tile(tile);
  write_atomic(path, std::span<const std::uint8_t>(bytes));
}

}  // namespace objvoice::util
