// Writes the builtin sprites as <dir>/<id>.rgb tiles.
#include <filesystem>
#include <iostream>

#include "objvoice/devsim/sprites.hpp"
#include "objvoice/util/rgb_tile.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_sprite_fixtures <dir>\n";
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  for (auto id : objvoice::devsim::kSpriteIds) {
    const auto path = dir / (std::string(id) + ".rgb");
    objvoice::util::write_tile(path, objvoice::devsim::make_sprite(id));
    std::cout << path.string() << "\n";
  }
  return 0;
}
