#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "objvoice/util/rgb_tile.hpp"

namespace objvoice::devsim {

// The eight desk-object categories the simulator can render.
inline constexpr std::array<std::string_view, 8> kSpriteIds = {
    "mug", "pumpkin", "tennis", "plant", "board", "notebook", "figurine", "lipstick"};

// Procedural sprite: an opaque, strongly saturated and textured tile in the
// category's hue. Throws Error(NotFound) for unknown ids.
util::RgbTile make_sprite(std::string_view id);

class SpriteLibrary {
 public:
  static SpriteLibrary builtin();
  // Every <id>.rgb in `dir`, with builtin sprites filling the gaps.
  static SpriteLibrary from_directory(const std::filesystem::path& dir);

  bool contains(std::string_view id) const { return tiles_.find(id) != tiles_.end(); }
  // Throws Error(NotFound).
  const util::RgbTile& get(std::string_view id) const;
  void add(std::string id, util::RgbTile tile) { tiles_[std::move(id)] = std::move(tile); }

 private:
  std::map<std::string, util::RgbTile, std::less<>> tiles_;
};

}  // namespace objvoice::devsim
