#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "objvoice/backends/http.hpp"
#include "objvoice/backends/mock.hpp"
#include "objvoice/devsim/sprites.hpp"
#include "objvoice/dialogue/request.hpp"
#include "objvoice/error.hpp"
#include "objvoice/vision/dataset.hpp"
#include "objvoice/vision/pipeline.hpp"
#include "stub_service.hpp"
#include "test_support.hpp"

namespace objvoice::backends {
namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidState;
}

protocol::ScopeFrame frame_with(std::string_view sprite, int x, int y) {
  auto f = testing::plain_frame();
  const auto t = devsim::make_sprite(sprite);
  for (int r = 0; r < t.height; ++r)
    std::copy_n(t.rgb.data() + static_cast<std::size_t>(r) * t.width * 3, t.width * 3,
                f.pixels.data() + (static_cast<std::size_t>(y + r) * f.width + x) * 3);
  return f;
}

vision::Dataset dataset_of(std::string_view sprite, std::uint32_t class_id,
                           std::vector<std::string> names) {
  MockSegmenter seg;
  std::vector<protocol::ScopeFrame> frames;
  for (int i = 0; i < 10; ++i) {
    frames.push_back(frame_with(sprite, 60 + 10 * i, 80));
    frames.back().sequence = static_cast<std::uint32_t>(i);
  }
  return vision::build_dataset(vision::annotate_frames(frames, seg, class_id), std::move(names), 0);
}

TEST(MockSegmenter, OneCandidatePerComponent) {
  auto f = frame_with("mug", 20, 20);
  testing::paint_square(f, 200, 200, 30, 0, 0, 255);
  testing::paint_square(f, 300, 10, 5, 255, 0, 0);  // below min_area
  MockSegmenter seg;
  const auto c = seg.segment(f);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].mask.area(), 48u * 48u);
  EXPECT_NEAR(c[0].saliency, 48.0 * 48.0 / (320.0 * 320.0), 1e-12);
  EXPECT_EQ(c[1].mask.area(), 900u);
  EXPECT_TRUE(seg.segment(testing::plain_frame()).empty());
}

TEST(MockTrainer, DeterministicIdAndEpochRule) {
  testing::TempDir dir;
  MockTrainer trainer(dir / "models");
  const auto ds = dataset_of("mug", 0, {"mug"});
  const auto a = trainer.train(ds, {}, nullptr);
  const auto b = trainer.train(ds, {}, nullptr);
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.id.rfind("mug", 0), std::string::npos);
  EXPECT_EQ(a.id.substr(0, 8), "mock-1c-");
  EXPECT_EQ(a.best_epoch, 35);   // 30 + 5 per class from scratch
  EXPECT_EQ(a.epochs_run, 60);   // best + patience
  EXPECT_TRUE(std::filesystem::exists(a.location / "templates" / "0.rgb"));

  const auto small = trainer.train(ds, {20, 5}, nullptr);
  EXPECT_EQ(small.best_epoch, 20);
  EXPECT_EQ(small.epochs_run, 20);

  const auto two = dataset_of("plant", 1, {"mug", "plant"});
  const auto merged = vision::merge_datasets(ds, two);
  const auto c = trainer.train(merged, {}, &a);
  EXPECT_EQ(c.best_epoch, 30);  // 20 + 5 per class when fine-tuning
  EXPECT_EQ(load_templates(c).size(), 2u);
}

TEST(MockDetector, MatchesTemplatesAndChargesCost) {
  testing::TempDir dir;
  VirtualClock clock;
  MockTrainer trainer(dir / "models");
  const auto ds = vision::merge_datasets(dataset_of("mug", 0, {"mug"}),
                                         dataset_of("plant", 1, {"mug", "plant"}));
  const auto model = trainer.train(ds, {}, nullptr);
  MockDetector det(clock);
  Stopwatch sw(clock);
  const auto d = det.detect(frame_with("plant", 200, 150), model);
  EXPECT_DOUBLE_EQ(sw.elapsed_ms(), 3.5);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].class_id, 1u);
  EXPECT_NEAR(d[0].confidence, 1.0, 1e-6);
  EXPECT_LT(d[1].confidence, 0.5);
  const auto r = vision::to_pixels(d[0].bbox, 320, 320);
  EXPECT_EQ(r.x0, 200);
  EXPECT_EQ(r.y0, 150);
  for (const auto& x : det.detect(testing::plain_frame(), model)) {
    EXPECT_GE(x.confidence, 0.0);
    EXPECT_LE(x.confidence, 1.0);
  }
}

TEST(MockChat, EchoAndScriptedModes) {
  dialogue::ChatRequest req;
  req.persona_name = "Mugsy";
  req.messages = {{"system", "s"}, {"user", "hello"}};
  MockChat chat;
  EXPECT_EQ(chat.complete(req), "Mugsy hears: hello.§");
  req.messages = {{"system", "s"}, {"user", "a"}, {"assistant", "b"}, {"user", "why?"}};
  EXPECT_EQ(chat.complete(req), "Mugsy hears: why?§I remember 2 earlier messages.§");
  req.language = persona::Language::Chinese;
  req.persona_name = "杯杯";
  EXPECT_EQ(chat.complete(req), "杯杯听到了：why?。§我还记得之前的2条消息。§");
  req.language = persona::Language::English;
  req.persona_name = "Mugsy";
  req.marker = "|";
  MockChat three(3);
  EXPECT_EQ(three.complete(req), "Mugsy hears: why?|This is sentence 2.|This is sentence 3.|");
}

TEST(MockSynth, ToneLengthAndPitch) {
  VirtualClock clock;
  MockSynthesizer synth(clock);
  const auto s = synth.synthesize("ab杯", persona::VoiceId::ElderlyMale, persona::Language::English);
  EXPECT_EQ(s.size(), 3u * 960u);
  // Zero crossings over 0.18 s of a 98 Hz sine.
  int crossings = 0;
  for (std::size_t i = 1; i < s.size(); ++i) crossings += (s[i - 1] < 0) != (s[i] < 0);
  EXPECT_NEAR(crossings, 2 * 98 * 0.18, 2);
  EXPECT_DOUBLE_EQ(MockSynthesizer::frequency_hz(persona::VoiceId::ChildFemale), 330.0);
  EXPECT_NEAR(synth.analytic_rtf(), 0.6297, 1e-12);
}

TEST(HttpPayloads, ImageAndMaskCodecs) {
  auto f = frame_with("tennis", 10, 10);
  const auto back = decode_image_b64(encode_image_b64(f));
  EXPECT_EQ(back.width, f.width);
  EXPECT_EQ(back.pixels, f.pixels);
  EXPECT_EQ(code_of([] { decode_image_b64("!!"); }), Errc::SchemaError);

  util::Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    vision::Mask m(1 + static_cast<int>(rng.below(30)), 1 + static_cast<int>(rng.below(30)));
    for (auto& b : m.bits) b = rng.below(3) == 0;
    const auto runs = encode_mask_rle(m);
    EXPECT_EQ(decode_mask_rle(m.width, m.height, runs).bits, m.bits);
  }
  const std::vector<std::uint32_t> short_runs = {3, 2};
  EXPECT_EQ(code_of([&] { decode_mask_rle(3, 3, short_runs); }), Errc::SchemaError);
}

TEST(BackendConfig, ParseAndValidate) {
  EXPECT_EQ(parse_backend_kind("mock"), BackendKind::Mock);
  EXPECT_EQ(parse_backend_kind("Http"), BackendKind::Http);
  EXPECT_FALSE(parse_backend_kind("grpc").has_value());
  BackendConfig c;
  c.kind = BackendKind::Http;
  EXPECT_EQ(code_of([&] { c.validate(); }), Errc::InvalidArgument);
  c.endpoint = protocol::Endpoint{"127.0.0.1", 1};
  EXPECT_NO_THROW(c.validate());
  c.retries = -1;
  EXPECT_EQ(code_of([&] { c.validate(); }), Errc::InvalidArgument);
  BackendsConfig all;
  EXPECT_EQ(code_of([&] { all.at("teleporter"); }), Errc::InvalidArgument);
}

class HttpAdapters : public ::testing::Test {
 protected:
  testing::TempDir dir{"http"};
  testing::StubService stub{dir / "stub-models"};
  VirtualClock clock;

  BackendConfig config(int retries = 2) {
    BackendConfig c;
    c.kind = BackendKind::Http;
    c.endpoint = stub.endpoint();
    c.retries = retries;
    c.timeout_ms = 2000;
    return c;
  }
};

TEST_F(HttpAdapters, EveryRouteAgreesWithTheMock) {
  VirtualClock local;
  auto mocks = make_mock_capabilities(local, dir / "local-models");
  const auto f = frame_with("mug", 100, 90);

  HttpSegmenter seg(config(), clock);
  const auto remote = seg.segment(f);
  const auto mine = mocks.segmenter->segment(f);
  ASSERT_EQ(remote.size(), mine.size());
  EXPECT_EQ(remote[0].mask.bits, mine[0].mask.bits);
  EXPECT_DOUBLE_EQ(remote[0].saliency, mine[0].saliency);

  HttpTrainer trainer(config(), clock);
  const auto ds = dataset_of("mug", 0, {"mug"});
  const auto model = trainer.train(ds, {}, nullptr);
  const auto local_model = mocks.trainer->train(ds, {}, nullptr);
  EXPECT_EQ(model.id, local_model.id);
  EXPECT_EQ(model.epochs_run, local_model.epochs_run);
  EXPECT_TRUE(model.location.empty());

  HttpDetector det(config(), clock);
  const auto d = det.detect(f, model);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0].confidence, mocks.detector->detect(f, local_model)[0].confidence, 1e-12);

  HttpPersonaGenerator gen(config(), clock);
  const auto doc = gen.generate({f, persona::Language::English, "prompt"});
  EXPECT_EQ(persona::validate_persona(doc).name, "Mugsy");

  HttpTranscriber stt(config(), clock);
  dialogue::PcmAudio audio;
  audio.samples.resize(1600);
  audio.annotation = "hello 杯子";
  EXPECT_EQ(stt.transcribe(audio, persona::Language::English), "hello 杯子");

  HttpChat chat(config(), clock);
  dialogue::ChatRequest req;
  req.persona_name = "Mugsy";
  req.messages = {{"system", "s"}, {"user", "hi"}};
  EXPECT_EQ(chat.complete(req), mocks.chat->complete(req));

  HttpSynthesizer tts(config(), clock);
  EXPECT_EQ(tts.synthesize("Hello.", persona::VoiceId::Neutral, persona::Language::English),
            mocks.synthesizer->synthesize("Hello.", persona::VoiceId::Neutral, persona::Language::English));
}

TEST_F(HttpAdapters, RetriesServerErrorsWithBackoff) {
  stub.fail_next("/chat", 2, 503);
  HttpChat chat(config(2), clock);
  dialogue::ChatRequest req;
  req.persona_name = "M";
  req.messages = {{"user", "x"}};
  Stopwatch sw(clock);
  EXPECT_EQ(chat.complete(req), "M hears: x.§");
  EXPECT_EQ(stub.requests("/chat"), 3);
  EXPECT_DOUBLE_EQ(sw.elapsed_ms(), 250.0 + 500.0);

  stub.fail_next("/chat", 5, 500, "boom");
  try {
    chat.complete(req);
    FAIL();
  } catch (const RemoteError& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_EQ(e.body(), "boom");
  }
  EXPECT_EQ(stub.requests("/chat"), 6);
}

TEST_F(HttpAdapters, ClientErrorsAndSchemaErrorsAreNotRetried) {
  stub.fail_next("/stt", 1, 422);
  HttpTranscriber stt(config(2), clock);
  dialogue::PcmAudio audio;
  audio.samples.resize(16);
  audio.annotation = "x";
  EXPECT_EQ(code_of([&] { stt.transcribe(audio, persona::Language::English); }), Errc::RemoteError);
  EXPECT_EQ(stub.requests("/stt"), 1);

  stub.reply_next("/stt", 1, R"({"txt":"x"})");
  EXPECT_EQ(code_of([&] { stt.transcribe(audio, persona::Language::English); }), Errc::SchemaError);
  stub.reply_next("/stt", 1, "not json");
  EXPECT_EQ(code_of([&] { stt.transcribe(audio, persona::Language::English); }), Errc::SchemaError);
  EXPECT_EQ(stub.requests("/stt"), 3);

  stub.reply_next("/tts", 1, R"({"audio_b64":"AAAA"})");
  HttpSynthesizer tts(config(), clock);
  EXPECT_EQ(code_of([&] { tts.synthesize("x", persona::VoiceId::Neutral, persona::Language::English); }),
            Errc::SchemaError);
}

TEST_F(HttpAdapters, TimeoutAndUnreachable) {
  stub.set_delay_ms("/chat", 600);
  auto c = config(0);
  c.timeout_ms = 150;
  HttpChat chat(c, clock);
  dialogue::ChatRequest req;
  req.messages = {{"user", "x"}};
  EXPECT_EQ(code_of([&] { chat.complete(req); }), Errc::Timeout);

  auto dead = config(1);
  dead.endpoint = protocol::Endpoint{"127.0.0.1", 1};
  HttpChat nowhere(dead, clock);
  Stopwatch sw(clock);
  EXPECT_EQ(code_of([&] { nowhere.complete(req); }), Errc::TransportError);
  EXPECT_DOUBLE_EQ(sw.elapsed_ms(), 250.0);
}

TEST_F(HttpAdapters, BearerKeyFromEnvironment) {
  ::setenv("OBJVOICE_TEST_KEY", "s3cret", 1);
  auto c = config();
  c.api_key_env = "OBJVOICE_TEST_KEY";
  HttpChat chat(c, clock);
  dialogue::ChatRequest req;
  req.messages = {{"user", "x"}};
  chat.complete(req);
  EXPECT_EQ(stub.last_authorization(), "Bearer s3cret");
  HttpChat anonymous(config(), clock);
  anonymous.complete(req);
  EXPECT_EQ(stub.last_authorization(), "");
  ::unsetenv("OBJVOICE_TEST_KEY");
}

TEST(MakeCapabilities, MixesSlots) {
  testing::TempDir dir;
  VirtualClock clock;
  BackendsConfig cfg;
  cfg.at("chat").kind = BackendKind::Http;
  cfg.at("chat").endpoint = protocol::Endpoint{"127.0.0.1", 9};
  const auto caps = make_capabilities(cfg, clock, dir / "m");
  EXPECT_TRUE(caps.complete());
  EXPECT_NE(dynamic_cast<HttpChat*>(caps.chat.get()), nullptr);
  EXPECT_NE(dynamic_cast<MockSynthesizer*>(caps.synthesizer.get()), nullptr);
  cfg.at("chat").endpoint.reset();
  EXPECT_EQ(code_of([&] { make_capabilities(cfg, clock, dir / "m"); }), Errc::InvalidArgument);
  CapabilitySet partial;
  EXPECT_EQ(partial.missing().size(), 7u);
}

}  // namespace
}  // namespace objvoice::backends
