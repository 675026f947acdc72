#include "objvoice/devsim/scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"
#include "objvoice/util/rng.hpp"

namespace objvoice::devsim {

using nlohmann::json;
using protocol::kDeviceFrameSide;

namespace {

// Stream tags for the counter-based noise.
constexpr std::uint64_t kBackgroundTag = 0xB6;
constexpr std::uint64_t kJitterTag = 0x717;
constexpr std::uint64_t kOcclusionTag = 0x0CC;

double unit_from(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::ScriptInvalid, what); }

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

std::pair<int, int> frame_range(const json& v) {
  if (!v.is_array() || v.size() != 2) invalid("frame range must be [first, last]");
  return {v[0].get<int>(), v[1].get<int>()};
}

}  // namespace

void SceneScript::validate(const SpriteLibrary& sprites) const {
  if (duration_frames < 0) invalid("duration_frames must be >= 0");
  if (fps <= 0) invalid("fps must be > 0");
  auto in_range = [&](int first, int last) {
    return 0 <= first && first <= last && last < duration_frames;
  };
  for (const auto& p : placements) {
    if (!sprites.contains(p.sprite)) invalid("unknown sprite " + p.sprite);
    if (!in_range(p.first_frame, p.last_frame)) invalid("placement frames outside the scene");
    if (p.path.empty()) invalid("placement needs at least one position");
    if (p.jitter_px < 0) invalid("jitter must be >= 0");
    auto fraction_ok = [](double f) { return f >= 0.0 && f <= 1.0; };
    if (!fraction_ok(p.occlusion) || !fraction_ok(p.occlusion_rate) ||
        !fraction_ok(p.occlusion_min) || !fraction_ok(p.occlusion_max) ||
        p.occlusion_min > p.occlusion_max) {
      invalid("occlusion values must lie in [0, 1]");
    }
    for (const auto& o : p.occlusions) {
      if (!in_range(o.first_frame, o.last_frame) || !fraction_ok(o.fraction)) {
        invalid("bad occlusion range");
      }
    }
  }
  for (const auto& a : acquaint) {
    if (a.label.empty()) invalid("acquaint step needs a label");
    if (!in_range(a.first_frame, a.last_frame)) invalid("acquaint frames outside the scene");
  }
  if (session_start_frame < 0 || session_start_frame > duration_frames) {
    invalid("session_start_frame outside the scene");
  }
}

SceneScript SceneScript::parse(std::string_view document) {
  const json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) invalid("scene is not a JSON object");
  try {
    SceneScript s;
    s.duration_frames = doc.at("duration_frames").get<int>();
    s.fps = get_or(doc, "fps", 20);
    s.seed = get_or<std::uint64_t>(doc, "seed", 0);
    s.session_start_frame = get_or(doc, "session_start_frame", 0);
    for (const json& pj : doc.value("placements", json::array())) {
      Placement p;
      p.sprite = pj.at("sprite").get<std::string>();
      std::tie(p.first_frame, p.last_frame) = frame_range(pj.at("frames"));
      for (const json& pt : pj.at("path")) p.path.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
      p.jitter_px = get_or(pj, "jitter", 0);
      p.occlusion = get_or(pj, "occlusion", 0.0);
      p.occlusion_rate = get_or(pj, "occlusion_rate", 0.0);
      p.occlusion_min = get_or(pj, "occlusion_min", 0.0);
      p.occlusion_max = get_or(pj, "occlusion_max", 0.0);
      for (const json& oj : pj.value("occlusions", json::array())) {
        OcclusionRange o;
        std::tie(o.first_frame, o.last_frame) = frame_range(oj.at("frames"));
        o.fraction = oj.at("fraction").get<double>();
        p.occlusions.push_back(o);
      }
      s.placements.push_back(std::move(p));
    }
    for (const json& aj : doc.value("acquaint", json::array())) {
      AcquaintStep a;
      a.label = aj.at("label").get<std::string>();
      std::tie(a.first_frame, a.last_frame) = frame_range(aj.at("frames"));
      s.acquaint.push_back(std::move(a));
    }
    return s;
  } catch (const json::exception& e) {
    invalid(std::string("scene: ") + e.what());
  }
}

SceneScript SceneScript::load(const std::filesystem::path& path) {
  return parse(util::read_text(path));
}

double occlusion_at(const Placement& p, std::size_t index, int frame, std::uint64_t seed) {
  for (const auto& o : p.occlusions) {
    if (o.first_frame <= frame && frame <= o.last_frame) return o.fraction;
  }
  if (p.occlusion_rate > 0.0) {
    const std::uint64_t h =
        util::hash_combine(util::hash_combine(util::hash_combine(seed, kOcclusionTag), index), frame);
    if (unit_from(h) < p.occlusion_rate) {
      return p.occlusion_min + (p.occlusion_max - p.occlusion_min) * unit_from(util::mix64(h));
    }
  }
  return p.occlusion;
}

std::pair<int, int> position_at(const Placement& p, std::size_t index, int frame,
                                std::uint64_t seed, int sprite_w, int sprite_h) {
  double x = p.path.front().first;
  double y = p.path.front().second;
  if (p.path.size() > 1 && p.last_frame > p.first_frame) {
    const double t = static_cast<double>(frame - p.first_frame) / (p.last_frame - p.first_frame) *
                     static_cast<double>(p.path.size() - 1);
    const auto seg = std::min(static_cast<std::size_t>(t), p.path.size() - 2);
    const double f = t - static_cast<double>(seg);
    x = p.path[seg].first + (p.path[seg + 1].first - p.path[seg].first) * f;
    y = p.path[seg].second + (p.path[seg + 1].second - p.path[seg].second) * f;
  }
  int px = static_cast<int>(std::lround(x));
  int py = static_cast<int>(std::lround(y));
  if (p.jitter_px > 0) {
    const std::uint64_t h =
        util::hash_combine(util::hash_combine(util::hash_combine(seed, kJitterTag), index), frame);
    const auto span = static_cast<std::uint64_t>(2 * p.jitter_px + 1);
    px += static_cast<int>(h % span) - p.jitter_px;
    py += static_cast<int>((h >> 32) % span) - p.jitter_px;
  }
  px = std::clamp(px, 0, kDeviceFrameSide - sprite_w);
  py = std::clamp(py, 0, kDeviceFrameSide - sprite_h);
  return {px, py};
}

protocol::ScopeFrame render_frame(const SceneScript& script, const SpriteLibrary& sprites,
                                  int frame, std::uint64_t seed) {
  protocol::ScopeFrame out;
  out.sequence = static_cast<std::uint32_t>(frame);
  out.timestamp_ms = script.timestamp_ms(frame);
  out.width = kDeviceFrameSide;
  out.height = kDeviceFrameSide;
  out.pixels.resize(static_cast<std::size_t>(kDeviceFrameSide) * kDeviceFrameSide * 3);

  // Low-saturation gray noise: a gray level per pixel plus small per-channel jitter.
  const std::uint64_t base = util::hash_combine(util::hash_combine(seed, kBackgroundTag), frame);
  for (std::size_t i = 0; i < out.pixels.size() / 3; ++i) {
    const std::uint64_t h = util::hash_combine(base, i);
    const int gray = 60 + static_cast<int>(h % 141);
    for (int c = 0; c < 3; ++c) {
      const int jitter = static_cast<int>((h >> (16 + 8 * c)) % 13) - 6;
      out.pixels[i * 3 + c] = static_cast<std::uint8_t>(gray + jitter);
    }
  }

  for (std::size_t index = 0; index < script.placements.size(); ++index) {
    const Placement& p = script.placements[index];
    if (frame < p.first_frame || frame > p.last_frame) continue;
    const util::RgbTile& tile = sprites.get(p.sprite);
    const auto [x0, y0] = position_at(p, index, frame, seed, tile.width, tile.height);
    const double occlusion = occlusion_at(p, index, frame, seed);
    const int hidden = static_cast<int>(std::lround(occlusion * tile.width));
    for (int y = 0; y < tile.height; ++y) {
      std::uint8_t* row = out.pixels.data() + (static_cast<std::size_t>(y0 + y) * kDeviceFrameSide + x0) * 3;
      const std::uint8_t* src = tile.rgb.data() + static_cast<std::size_t>(y) * tile.width * 3;
      std::fill_n(row, hidden * 3, kOccluderGray);
      std::copy(src + hidden * 3, src + tile.width * 3, row + hidden * 3);
    }
  }
  return out;
}

SimulatedScope::SimulatedScope(SceneScript script, std::shared_ptr<const SpriteLibrary> sprites,
                               std::uint64_t seed)
    : SimulatedScope(script, std::move(sprites), seed, 0, script.duration_frames) {}

SimulatedScope::SimulatedScope(SceneScript script, std::shared_ptr<const SpriteLibrary> sprites,
                               std::uint64_t seed, int first, int end)
    : script_(std::move(script)), sprites_(std::move(sprites)), seed_(seed), cursor_(first),
      end_(std::min(end, script_.duration_frames)) {
  script_.validate(*sprites_);
}

protocol::ScopeFrame SimulatedScope::next_frame() {
  if (killed_) throw Error(Errc::SourceLost, "scope disconnected");
  if (cursor_ >= end_) throw Error(Errc::SourceLost, "scene ended");
  return render_frame(script_, *sprites_, cursor_++, seed_);
}

}  // namespace objvoice::devsim
