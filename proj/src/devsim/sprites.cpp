#include "objvoice/devsim/sprites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "objvoice/error.hpp"
#include "objvoice/util/rng.hpp"

namespace objvoice::devsim {

namespace {

struct Shape {
  int width;
  int height;
  double hue_deg;
};

constexpr Shape kShapes[] = {
    {48, 48, 0.0},    // mug
    {52, 48, 30.0},   // pumpkin
    {44, 44, 60.0},   // tennis
    {40, 56, 120.0},  // plant
    {56, 44, 180.0},  // board
    {48, 56, 210.0},  // notebook
    {36, 56, 270.0},  // figurine
    {24, 56, 330.0},  // lipstick
};

double frac(double x) { return x - std::floor(x); }

double pattern(std::size_t kind, double u, double v) {
  constexpr double kTau = 2.0 * std::numbers::pi;
  switch (kind) {
    case 0: return 0.5 + 0.35 * std::sin(kTau * 3.0 * v) + 0.15 * std::cos(kTau * u);
    case 1: return std::abs(std::sin(std::numbers::pi * 5.0 * u)) * (1.0 - 0.4 * v);
    case 2: return 1.0 - std::min(1.0, 6.0 * std::abs(0.5 + 0.3 * std::sin(kTau * u) - v));
    case 3: return 1.0 - std::abs(2.0 * frac(3.0 * (u + v)) - 1.0);
    case 4: return ((static_cast<int>(4 * u) + static_cast<int>(4 * v)) & 1) * 0.7 + 0.3 * u;
    case 5: return frac(8.0 * v) < 0.2 ? 0.15 : 0.9 - 0.3 * u;
    case 6: return 0.5 + 0.5 * std::cos(kTau * 4.0 * std::hypot(u - 0.5, v - 0.5));
    default: return 0.5 + 0.5 * std::sin(kTau * (3.0 * u - 2.0 * v));
  }
}

// h in degrees, s and v in [0, 1].
void hsv_to_rgb(double h, double s, double v, std::uint8_t* out) {
  h = std::fmod(h + 360.0, 360.0) / 60.0;
  const double c = v * s;
  const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h)) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  const double m = v - c;
  out[0] = static_cast<std::uint8_t>(std::lround((r + m) * 255.0));
  out[1] = static_cast<std::uint8_t>(std::lround((g + m) * 255.0));
  out[2] = static_cast<std::uint8_t>(std::lround((b + m) * 255.0));
}

}  // namespace

util::RgbTile make_sprite(std::string_view id) {
  auto it = std::find(kSpriteIds.begin(), kSpriteIds.end(), id);
  if (it == kSpriteIds.end()) throw Error(Errc::NotFound, "unknown sprite " + std::string(id));
  const auto kind = static_cast<std::size_t>(it - kSpriteIds.begin());
  const Shape& shape = kShapes[kind];

  util::RgbTile tile{shape.width, shape.height, {}};
  tile.rgb.resize(static_cast<std::size_t>(shape.width) * shape.height * 3);
  for (int y = 0; y < shape.height; ++y) {
    for (int x = 0; x < shape.width; ++x) {
      const std::uint64_t h = util::hash_combine(util::hash_combine(kind, x), y);
      const double grain = static_cast<double>(h & 0xFF) / 255.0 - 0.5;  // [-0.5, 0.5]
      const double p = std::clamp(pattern(kind, (x + 0.5) / shape.width, (y + 0.5) / shape.height) +
                                      0.3 * grain,
                                  0.0, 1.0);
      const double hue = shape.hue_deg + 5.0 * (p - 0.5);
      const double sat = 0.55 + 0.43 * (1.0 - p);
      const double val = 0.22 + 0.78 * p;
      hsv_to_rgb(hue, sat, val, &tile.rgb[(static_cast<std::size_t>(y) * shape.width + x) * 3]);
    }
  }
  return tile;
}

SpriteLibrary SpriteLibrary::builtin() {
  SpriteLibrary lib;
  for (auto id : kSpriteIds) lib.add(std::string(id), make_sprite(id));
  return lib;
}

SpriteLibrary SpriteLibrary::from_directory(const std::filesystem::path& dir) {
  SpriteLibrary lib = builtin();
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".rgb") {
      lib.add(entry.path().stem().string(), util::read_tile(entry.path()));
    }
  }
  if (ec) throw Error(Errc::IoFailure, "cannot list sprites in " + dir.string());
  return lib;
}

const util::RgbTile& SpriteLibrary::get(std::string_view id) const {
  auto it = tiles_.find(id);
  if (it == tiles_.end()) throw Error(Errc::NotFound, "unknown sprite " + std::string(id));
  return it->second;
}

}  // namespace objvoice::devsim
