#include <gtest/gtest.h>

#include "objvoice/backends/mock.hpp"
#include "objvoice/devsim/scene.hpp"
#include "objvoice/devsim/sprites.hpp"
#include "objvoice/devsim/wand.hpp"
#include "objvoice/error.hpp"
#include "objvoice/util/rgb_tile.hpp"
#include "test_support.hpp"

namespace objvoice::devsim {
namespace {

using namespace std::chrono_literals;

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidState;
}

const char* kScene = R"({
  "duration_frames": 10, "fps": 20, "seed": 3,
  "placements": [{"sprite": "mug", "frames": [0, 9], "path": [[10, 20], [100, 20]]}]
})";

TEST(Sprites, BuiltinsAreDistinctAndOpaque) {
  auto lib = SpriteLibrary::builtin();
  for (auto id : kSpriteIds) {
    ASSERT_TRUE(lib.contains(id));
    const auto& t = lib.get(id);
    EXPECT_EQ(t.rgb.size(), static_cast<std::size_t>(t.width) * t.height * 3);
    EXPECT_EQ(t, make_sprite(id));  // procedural, hence reproducible
  }
  EXPECT_NE(lib.get("mug"), lib.get("pumpkin"));
  EXPECT_EQ(code_of([] { make_sprite("spoon"); }), Errc::NotFound);
  EXPECT_EQ(code_of([&] { lib.get("spoon"); }), Errc::NotFound);
}

TEST(Sprites, DirectoryOverridesBuiltins) {
  testing::TempDir dir;
  util::RgbTile tile{16, 16, std::vector<std::uint8_t>(16 * 16 * 3, 200)};
  util::write_tile(dir / "mug.rgb", tile);
  util::write_tile(dir / "spoon.rgb", tile);
  auto lib = SpriteLibrary::from_directory(dir.path());
  EXPECT_EQ(lib.get("mug"), tile);
  EXPECT_EQ(lib.get("spoon"), tile);
  EXPECT_EQ(lib.get("plant"), make_sprite("plant"));
}

TEST(Scene, ParseAndTimestamps) {
  const auto s = SceneScript::parse(kScene);
  EXPECT_EQ(s.duration_frames, 10);
  ASSERT_EQ(s.placements.size(), 1u);
  EXPECT_EQ(s.placements[0].path.size(), 2u);
  EXPECT_EQ(s.timestamp_ms(7), 350);
  EXPECT_NO_THROW(s.validate(SpriteLibrary::builtin()));
  EXPECT_EQ(code_of([] { SceneScript::parse("[1]"); }), Errc::ScriptInvalid);
  EXPECT_EQ(code_of([] { SceneScript::parse(R"({"fps": 20})"); }), Errc::ScriptInvalid);
}

TEST(Scene, ValidationErrors) {
  const auto lib = SpriteLibrary::builtin();
  auto s = SceneScript::parse(kScene);
  s.placements[0].sprite = "spoon";
  EXPECT_EQ(code_of([&] { s.validate(lib); }), Errc::ScriptInvalid);
  s = SceneScript::parse(kScene);
  s.placements[0].last_frame = 10;
  EXPECT_EQ(code_of([&] { s.validate(lib); }), Errc::ScriptInvalid);
  s = SceneScript::parse(kScene);
  s.placements[0].occlusion = 1.5;
  EXPECT_EQ(code_of([&] { s.validate(lib); }), Errc::ScriptInvalid);
  s = SceneScript::parse(kScene);
  s.acquaint.push_back({"mug", 5, 12});
  EXPECT_EQ(code_of([&] { s.validate(lib); }), Errc::ScriptInvalid);
  s = SceneScript::parse(kScene);
  s.fps = 0;
  EXPECT_EQ(code_of([&] { s.validate(lib); }), Errc::ScriptInvalid);
}

TEST(Scene, RenderIsAPureFunctionOfItsInputs) {
  const auto s = SceneScript::parse(kScene);
  const auto lib = SpriteLibrary::builtin();
  const auto a = render_frame(s, lib, 4, 3);
  const auto b = render_frame(s, lib, 4, 3);
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_NE(a.pixels, render_frame(s, lib, 4, 4).pixels);
  EXPECT_NE(a.pixels, render_frame(s, lib, 5, 3).pixels);
  EXPECT_EQ(a.sequence, 4u);
  EXPECT_EQ(a.timestamp_ms, 200);
  EXPECT_NO_THROW(protocol::validate_frame(a));
}

TEST(Scene, SpriteFollowsPathExactly) {
  const auto s = SceneScript::parse(kScene);
  const auto lib = SpriteLibrary::builtin();
  const auto& mug = lib.get("mug");
  for (int frame : {0, 9}) {
    const auto f = render_frame(s, lib, frame, 1);
    const int x0 = frame == 0 ? 10 : 100;
    for (int y = 0; y < mug.height; y += 7) {
      for (int x = 0; x < mug.width; x += 5) {
        const auto* got = f.pixel(x0 + x, 20 + y);
        const auto* want = mug.rgb.data() + (static_cast<std::size_t>(y) * mug.width + x) * 3;
        ASSERT_TRUE(std::equal(want, want + 3, got));
      }
    }
  }
  // Midway along a two-point path.
  const auto [x, y] = position_at(s.placements[0], 0, 4, 1, mug.width, mug.height);
  EXPECT_EQ(x, 50);
  EXPECT_EQ(y, 20);
}

TEST(Scene, PositionsClampInsideTheFrame) {
  Placement p;
  p.first_frame = 0;
  p.last_frame = 0;
  p.path = {{400, -30}};
  const auto [x, y] = position_at(p, 0, 0, 0, 48, 48);
  EXPECT_EQ(x, 320 - 48);
  EXPECT_EQ(y, 0);
}

TEST(Scene, JitterStaysWithinBounds) {
  Placement p;
  p.first_frame = 0;
  p.last_frame = 100;
  p.path = {{100, 100}};
  p.jitter_px = 3;
  for (int f = 0; f <= 100; ++f) {
    const auto [x, y] = position_at(p, 0, f, 9, 48, 48);
    EXPECT_LE(std::abs(x - 100), 3);
    EXPECT_LE(std::abs(y - 100), 3);
  }
}

TEST(Scene, OcclusionRulesAndPrecedence) {
  Placement p;
  p.first_frame = 0;
  p.last_frame = 999;
  p.occlusion = 0.1;
  EXPECT_DOUBLE_EQ(occlusion_at(p, 0, 5, 1), 0.1);
  p.occlusion_rate = 0.5;
  p.occlusion_min = 0.2;
  p.occlusion_max = 0.3;
  int hits = 0;
  for (int f = 0; f < 1000; ++f) {
    const double o = occlusion_at(p, 0, f, 1);
    if (o == 0.1) continue;
    ++hits;
    ASSERT_GE(o, 0.2);
    ASSERT_LE(o, 0.3);
  }
  EXPECT_GT(hits, 400);
  EXPECT_LT(hits, 600);
  p.occlusions.push_back({10, 20, 0.7});
  EXPECT_DOUBLE_EQ(occlusion_at(p, 0, 15, 1), 0.7);
}

// Property: a larger occluded fraction never shows more of the object.
TEST(Scene, OcclusionIsMonotoneInVisibleArea) {
  const auto lib = SpriteLibrary::builtin();
  backends::MockSegmenter seg;
  util::Rng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    SceneScript s = SceneScript::parse(kScene);
    s.placements[0].sprite = std::string(kSpriteIds[rng.below(kSpriteIds.size())]);
    s.placements[0].path = {{static_cast<double>(rng.below(200)), static_cast<double>(rng.below(200))}};
    std::size_t previous = SIZE_MAX;
    for (double frac = 0.0; frac <= 0.9; frac += 0.15) {
      s.placements[0].occlusion = frac;
      const auto c = seg.segment(render_frame(s, lib, 0, 5));
      const std::size_t area = c.empty() ? 0 : c[0].mask.area();
      ASSERT_LE(area, previous) << s.placements[0].sprite << " " << frac;
      previous = area;
    }
  }
}

TEST(Scope, PlaysRangeThenLosesSource) {
  auto s = SceneScript::parse(kScene);
  auto lib = std::make_shared<SpriteLibrary>(SpriteLibrary::builtin());
  SimulatedScope scope(s, lib, 3, 2, 5);
  EXPECT_EQ(scope.next_frame().sequence, 2u);
  EXPECT_EQ(scope.next_frame().sequence, 3u);
  EXPECT_EQ(scope.next_frame().sequence, 4u);
  EXPECT_EQ(code_of([&] { scope.next_frame(); }), Errc::SourceLost);
  scope.seek(0);
  EXPECT_EQ(scope.next_frame().pixels, render_frame(s, *lib, 0, 3).pixels);
  scope.kill();
  EXPECT_EQ(code_of([&] { scope.next_frame(); }), Errc::SourceLost);

  s.placements[0].sprite = "spoon";
  EXPECT_EQ(code_of([&] { SimulatedScope bad(s, lib, 0); }), Errc::ScriptInvalid);
}

TEST(WandScript, ParseAndValidate) {
  const auto w = WandScript::parse(R"({"events":[
    {"at_ms": 10, "kind": "TOUCH_DOWN", "say": "hi"}, {"at_ms": 50, "kind": "TOUCH_UP"}]})");
  ASSERT_EQ(w.events.size(), 2u);
  EXPECT_EQ(w.events[0].say, "hi");
  EXPECT_EQ(code_of([] { WandScript::parse(R"({"events":[{"at_ms":0,"kind":"TOUCH_UP"}]})"); }),
            Errc::ScriptInvalid);
  EXPECT_EQ(code_of([] {
              WandScript::parse(R"({"events":[{"at_ms":9,"kind":"TOUCH_DOWN"},{"at_ms":3,"kind":"TOUCH_UP"}]})");
            }),
            Errc::ScriptInvalid);
  EXPECT_EQ(code_of([] { WandScript::parse(R"({"events":[{"at_ms":0,"kind":"SQUEEZE"}]})"); }),
            Errc::ScriptInvalid);
  EXPECT_EQ(code_of([] { WandScript::parse("nope"); }), Errc::ScriptInvalid);
}

TEST(VirtualWand, EmitsOnScheduleAndTracksFeedback) {
  const auto w = WandScript::load(testing::fixture("scenes/2cycles.json"));
  const auto schedule = wand_schedule(w);
  ASSERT_EQ(schedule.size(), 4u);
  for (std::uint16_t i = 0; i < 4; ++i) EXPECT_EQ(protocol::decode_wand_message(schedule[i].second).sequence, i);

  auto [engine, device] = protocol::make_pipe();
  VirtualWand wand(w, *device);
  EXPECT_EQ(wand.emit_until(999), 0u);
  EXPECT_EQ(wand.next_event_ms(), 1000);
  EXPECT_EQ(wand.emit_until(5000), 2u);
  protocol::WandStreamDecoder dec;
  const auto got = dec.feed(engine->read(0ms));
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].kind, protocol::WandKind::TouchDown);

  engine->write(protocol::encode_control_message({protocol::ControlKind::RecordStarted, 0}));
  wand.poll_feedback();
  EXPECT_TRUE(wand.vibrating());
  engine->write(protocol::encode_control_message({protocol::ControlKind::VibrateOff, 1}));
  engine->write(protocol::encode_control_message({protocol::ControlKind::RecordRejected, 2}));
  wand.poll_feedback();
  EXPECT_FALSE(wand.vibrating());
  EXPECT_EQ(wand.record_started_count(), 1u);
  EXPECT_EQ(wand.record_rejected_count(), 1u);

  VirtualClock clock;
  wand.run(clock);
  EXPECT_TRUE(wand.finished());
  EXPECT_EQ(whole_ms(clock.now()), 10400);
}

TEST(VirtualMicrophone, HearsTheLatestPress) {
  const auto w = WandScript::load(testing::fixture("scenes/2cycles.json"));
  VirtualMicrophone mic(w);
  mic.start(1000ms);
  EXPECT_EQ(mic.stop(3200ms).annotation, "Hello little mug");
  mic.start(9000ms);
  EXPECT_EQ(mic.stop(10400ms).annotation, "Do you remember me");
}

}  // namespace
}  // namespace objvoice::devsim
