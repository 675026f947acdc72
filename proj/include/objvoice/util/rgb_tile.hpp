#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace objvoice::util {

// Small raw RGB8 image. On disk: u16 width, u16 height (big-endian), then
// width*height*3 bytes, row-major.
struct RgbTile {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  friend bool operator==(const RgbTile&, const RgbTile&) = default;
};

std::vector<std::uint8_t> encode_tile(const RgbTile& tile);
// Throws Error(ParseError) when the payload does not match its header.
RgbTile decode_tile(std::span<const std::uint8_t> bytes);

RgbTile read_tile(const std::filesystem::path& path);
void write_tile(const std::filesystem::path& path, const RgbTile& tile);

}  // namespace objvoice::util
