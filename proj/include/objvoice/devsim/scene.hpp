#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "objvoice/devsim/sprites.hpp"
#include "objvoice/protocol/frame.hpp"

namespace objvoice::devsim {

struct OcclusionRange {
  int first_frame = 0;
  int last_frame = 0;  // inclusive
  double fraction = 0.0;
};

// One sprite shown over a frame range. Occlusion hides the leftmost
// `fraction` of the sprite's columns behind a flat gray occluder.
struct Placement {
  std::string sprite;
  int first_frame = 0;
  int last_frame = 0;  // inclusive
  // Top-left positions in pixels, visited at even intervals over the range.
  std::vector<std::pair<double, double>> path;
  int jitter_px = 0;
  double occlusion = 0.0;
  // Per-frame random occlusion: with probability occlusion_rate the frame's
  // fraction is drawn uniformly from [occlusion_min, occlusion_max].
  double occlusion_rate = 0.0;
  double occlusion_min = 0.0;
  double occlusion_max = 0.0;
  // Explicit ranges take precedence over both of the above.
  std::vector<OcclusionRange> occlusions;
};

// A frame range whose contents the simulated session uses to get acquainted
// with one object.
struct AcquaintStep {
  std::string label;
  int first_frame = 0;
  int last_frame = 0;  // inclusive
};

struct SceneScript {
  int duration_frames = 0;
  int fps = 20;
  std::uint64_t seed = 0;  // background noise
  std::vector<Placement> placements;
  std::vector<AcquaintStep> acquaint;
  int session_start_frame = 0;

  // Throws Error(ScriptInvalid).
  void validate(const SpriteLibrary& sprites) const;
  std::int64_t timestamp_ms(int frame) const {
    return static_cast<std::int64_t>(frame) * 1000 / fps;
  }

  // Throws Error(ScriptInvalid) (including for malformed JSON).
  static SceneScript parse(std::string_view document);
  static SceneScript load(const std::filesystem::path& path);
};

inline constexpr std::uint8_t kOccluderGray = 128;

double occlusion_at(const Placement& placement, std::size_t placement_index, int frame,
                    std::uint64_t seed);
std::pair<int, int> position_at(const Placement& placement, std::size_t placement_index,
                                int frame, std::uint64_t seed, int sprite_w, int sprite_h);

// Pure function of (script, sprites, frame index, seed).
protocol::ScopeFrame render_frame(const SceneScript& script, const SpriteLibrary& sprites,
                                  int frame, std::uint64_t seed);

// Plays frames [first, end) of a scene. Past the end (or after kill()) every
// request fails with Error(SourceLost).
class SimulatedScope final : public protocol::FrameSource {
 public:
  SimulatedScope(SceneScript script, std::shared_ptr<const SpriteLibrary> sprites,
                 std::uint64_t seed);
  SimulatedScope(SceneScript script, std::shared_ptr<const SpriteLibrary> sprites,
                 std::uint64_t seed, int first, int end);

  protocol::ScopeFrame next_frame() override;

  int position() const { return cursor_; }
  void seek(int frame) { cursor_ = frame; }
  void kill() { killed_ = true; }
  const SceneScript& script() const { return script_; }

 private:
  SceneScript script_;
  std::shared_ptr<const SpriteLibrary> sprites_;
  std::uint64_t seed_;
  int cursor_;
  int end_;
  bool killed_ = false;
};

}  // namespace objvoice::devsim
