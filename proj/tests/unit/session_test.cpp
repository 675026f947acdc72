#include <gtest/gtest.h>

#include <httplib.h>

#include "objvoice/backends/mock.hpp"
#include "objvoice/devsim/scene.hpp"
#include "objvoice/error.hpp"
#include "objvoice/util/files.hpp"
#include "objvoice/orchestrator/api_server.hpp"
#include "objvoice/orchestrator/events.hpp"
#include "objvoice/orchestrator/registry.hpp"
#include "objvoice/orchestrator/session.hpp"
#include "test_support.hpp"

namespace objvoice::orchestrator {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using protocol::ControlKind;
using protocol::WandKind;

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidState;
}

// ---------------------------------------------------------------- registry

TEST(Registry, DenseIdsAndDocumentRoundTrip) {
  ObjectRegistry r;
  EXPECT_EQ(code_of([&] { r.add({1, "x", {}, {}, 0}); }), Errc::InvalidArgument);
  r.add({0, "mug", "personas/0.json", "history/0.json", 100});
  r.add({1, "杯子", "personas/1.json", "history/1.json", 200});
  EXPECT_EQ(r.next_class_id(), 2u);
  EXPECT_EQ(r.get(1).label, "杯子");
  EXPECT_EQ(code_of([&] { r.get(2); }), Errc::NotFound);
  EXPECT_EQ(code_of([&] { r.set_active(5u); }), Errc::NotFound);
  r.set_active(1u);
  EXPECT_EQ(r.active(), 1u);
  const auto back = ObjectRegistry::from_document(r.to_document());
  EXPECT_EQ(back, r);
  EXPECT_FALSE(back.active().has_value());
  EXPECT_EQ(code_of([] { ObjectRegistry::from_document("[]"); }), Errc::ParseError);
}

TEST(Workspace, ModelLocationIsStoredRelative) {
  testing::TempDir dir;
  Workspace ws{dir.path()};
  EXPECT_TRUE(ws.load_registry().empty());
  EXPECT_FALSE(ws.load_model().has_value());
  vision::ModelHandle m;
  m.id = "mock-1c-abc";
  m.class_names = {"mug"};
  m.location = dir.path() / "models" / m.id;
  m.epochs_run = 60;
  m.best_epoch = 35;
  ws.save_model(m);
  EXPECT_EQ(util::read_text(ws.model_path()).find(dir.path().string()), std::string::npos);
  const auto back = ws.load_model();
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->location, m.location);
  EXPECT_EQ(back->class_names, m.class_names);
  EXPECT_EQ(back->epochs_run, 60);
}

// ---------------------------------------------------------------- events

TEST(EventBus, SequencedBoundedAndWaitable) {
  EventBus bus(3);
  for (int i = 0; i < 5; ++i) bus.publish("STATE", {{"i", i}});
  EXPECT_EQ(bus.last_seq(), 5u);
  const auto all = bus.since(0);
  ASSERT_EQ(all.size(), 3u);  // backlog keeps the newest three
  EXPECT_EQ(all.front().seq, 3u);
  EXPECT_TRUE(bus.since(5).empty());

  std::thread t([&] {
    std::this_thread::sleep_for(30ms);
    bus.publish("CONTROL", {});
  });
  const auto waited = bus.since(5, 2000ms);
  t.join();
  ASSERT_EQ(waited.size(), 1u);
  EXPECT_EQ(waited[0].type, "CONTROL");

  const auto line = all[0].to_line();
  EXPECT_EQ(line.back(), '\n');
  const auto parsed = SessionEvent::from_line(line);
  EXPECT_EQ(parsed.seq, all[0].seq);
  EXPECT_EQ(parsed.payload, all[0].payload);
  EXPECT_THROW(SessionEvent::from_line("{"), Error);
}

TEST(Commands, Parse) {
  EXPECT_EQ(Command::parse(R"({"type":"WAND","kind":"TOUCH_UP"})").wand, WandKind::TouchUp);
  const auto e = Command::parse(R"({"type":"PERSONA_EDIT","class_id":2,"set":{"name":"Bo"}})");
  EXPECT_EQ(e.kind, Command::Kind::PersonaEdit);
  EXPECT_EQ(e.set.at("name"), "Bo");
  EXPECT_EQ(Command::parse(R"({"type":"SAY","text":"hi"})").text, "hi");
  EXPECT_EQ(code_of([] { Command::parse(R"({"type":"DANCE"})"); }), Errc::ParseError);
  EXPECT_EQ(code_of([] { Command::parse(R"({"type":"WAND","kind":"X"})"); }), Errc::ParseError);
}

TEST(ApiServer, EventsCommandsAndAudio) {
  EventBus bus;
  CommandQueue queue;
  ApiServer api(protocol::Endpoint::parse("127.0.0.1:0"), bus, queue);
  bus.publish("STATE", {{"state", "IDLE"}});
  bus.audio().put(0, {'R', 'I', 'F', 'F'});

  httplib::Client cli("127.0.0.1", api.port());
  auto events = cli.Get("/events?after=0&wait_ms=0");
  ASSERT_TRUE(events);
  EXPECT_EQ(events->status, 200);
  EXPECT_EQ(SessionEvent::from_line(events->body).type, "STATE");

  auto ok = cli.Post("/command", R"({"type":"SAY","text":"hello"})", "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 202);
  auto bad = cli.Post("/command", "{}", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  const auto cmd = queue.pop(100ms);
  ASSERT_TRUE(cmd.has_value());
  EXPECT_EQ(cmd->text, "hello");
  EXPECT_FALSE(queue.pop().has_value());

  auto wav = cli.Get("/audio/0.wav");
  ASSERT_TRUE(wav);
  EXPECT_EQ(wav->body, "RIFF");
  EXPECT_EQ(cli.Get("/audio/9.wav")->status, 404);
  api.stop();
}

// ---------------------------------------------------------------- session

class FailingPersona final : public backends::PersonaGenerator {
 public:
  std::string generate(const backends::PersonaRequest&) override { throw std::runtime_error("down"); }
};
class FailingTrainer final : public backends::Trainer {
 public:
  vision::ModelHandle train(const vision::Dataset&, const backends::TrainOptions&,
                            const vision::ModelHandle*) override {
    throw std::runtime_error("out of memory");
  }
};
class SwitchableChat final : public backends::ChatModel {
 public:
  bool fail = false;
  std::string reply;
  std::string complete(const dialogue::ChatRequest& r) override {
    if (fail) throw std::runtime_error("rate limited");
    if (!reply.empty()) return reply;
    return inner.complete(r);
  }
  backends::MockChat inner;
};
class FailingSynth final : public backends::Synthesizer {
 public:
  std::vector<std::int16_t> synthesize(std::string_view, persona::VoiceId, persona::Language) override {
    throw std::runtime_error("no voice");
  }
};

class SessionTest : public ::testing::Test {
 protected:
  testing::TempDir dir{"session"};
  VirtualClock clock;
  backends::CapabilitySet caps = backends::make_mock_capabilities(clock, dir / "ws" / "models");
  std::shared_ptr<SwitchableChat> chat = std::make_shared<SwitchableChat>();
  devsim::SceneScript scene = devsim::SceneScript::load(testing::fixture("scenes/two_objects.json"));
  std::shared_ptr<const devsim::SpriteLibrary> sprites =
      std::make_shared<devsim::SpriteLibrary>(devsim::SpriteLibrary::builtin());
  EventBus bus;

  SessionConfig config() {
    SessionConfig c;
    c.acquaintance_frames = 20;
    return c;
  }
  std::unique_ptr<Session> open() {
    caps.chat = chat;
    return std::make_unique<Session>(dir / "ws", caps, clock, config(), &bus);
  }
  ObjectProfile acquaint(Session& s, int first, const std::string& label) {
    devsim::SimulatedScope scope(scene, sprites, scene.seed, first, first + 100);
    return s.acquaint(scope, label, persona::Language::English);
  }
  protocol::ScopeFrame frame(int index) { return devsim::render_frame(scene, *sprites, index, scene.seed); }
};

TEST_F(SessionTest, RequiresEveryCapability) {
  caps.detector.reset();
  EXPECT_EQ(code_of([&] { Session s(dir / "ws", caps, clock); }), Errc::InvalidArgument);
}

TEST_F(SessionTest, AcquaintCommitsEverything) {
  auto s = open();
  const auto p = acquaint(*s, 0, "mug");
  EXPECT_EQ(p.class_id, 0u);
  EXPECT_EQ(p.persona_path, fs::path("personas/0.json"));
  EXPECT_EQ(s->personas().load(0).name, "Mugsy");
  ASSERT_TRUE(s->model().has_value());
  EXPECT_EQ(s->model()->class_names, std::vector<std::string>{"mug"});
  const auto ds = vision::load_annotations(s->workspace().dataset_dir(0));
  EXPECT_EQ(ds.train.size(), 14u);
  EXPECT_EQ(ds.val.size(), 4u);
  EXPECT_EQ(ds.test.size(), 2u);

  const auto q = acquaint(*s, 100, "plant");
  EXPECT_EQ(q.class_id, 1u);
  EXPECT_EQ(s->model()->class_names, (std::vector<std::string>{"mug", "plant"}));
  EXPECT_EQ(s->personas().load(1).name, "Fern");

  // A new session over the same directory sees the same state.
  auto reopened = open();
  EXPECT_EQ(reopened->registry(), s->registry());
  EXPECT_EQ(reopened->model()->id, s->model()->id);
  EXPECT_EQ(reopened->handle_frame(frame(150)).front().class_id, 1u);
}

TEST_F(SessionTest, FailedAcquaintanceLeavesTheWorkspaceUntouched) {
  {
    auto s = open();
    acquaint(*s, 0, "mug");
  }
  const auto before = testing::snapshot(dir / "ws");

  auto try_with = [&](auto mutate, Errc expected, int first = 100, int last = 200) {
    auto broken = caps;
    mutate(broken);
    broken.chat = chat;
    Session s(dir / "ws", broken, clock, config());
    devsim::SimulatedScope scope(scene, sprites, scene.seed, first, last);
    EXPECT_EQ(code_of([&] { s.acquaint(scope, "plant", persona::Language::English); }), expected);
    EXPECT_EQ(s.registry().size(), 1u);
    EXPECT_EQ(s.model()->class_names.size(), 1u);
    EXPECT_EQ(testing::snapshot(dir / "ws"), before);
  };
  try_with([](auto& c) { c.persona_generator = std::make_shared<FailingPersona>(); }, Errc::BackendFailure);
  try_with([](auto& c) { c.trainer = std::make_shared<FailingTrainer>(); }, Errc::TrainerFailure);
  try_with([](auto&) {}, Errc::SourceLost, 100, 110);  // ten frames, twenty needed
  try_with([](auto&) {}, Errc::EmptyMask, 600, 700);   // empty desk
}

TEST_F(SessionTest, PushToTalkCycle) {
  auto s = open();
  acquaint(*s, 0, "mug");
  dialogue::TextMicrophone mic;

  auto rejected = s->handle_wand({WandKind::TouchDown, 1}, mic);
  ASSERT_EQ(rejected.controls.size(), 1u);
  EXPECT_EQ(rejected.controls[0].kind, ControlKind::RecordRejected);
  EXPECT_EQ(s->state().phase, Phase::Idle);

  clock.set(1000ms);
  s->handle_frame(frame(250));
  EXPECT_EQ(s->state(), (SessionState{Phase::Tracking, 0u}));

  auto down = s->handle_wand({WandKind::TouchDown, 2}, mic);
  ASSERT_EQ(down.controls.size(), 1u);
  EXPECT_EQ(down.controls[0], (protocol::ControlMessage{ControlKind::RecordStarted, 2}));
  EXPECT_FALSE(down.cycle_ready);
  mic.set_utterance("good morning");
  clock.set(2500ms);
  auto up = s->handle_wand({WandKind::TouchUp, 3}, mic);
  ASSERT_EQ(up.controls.size(), 1u);
  EXPECT_EQ(up.controls[0].kind, ControlKind::VibrateOff);
  EXPECT_TRUE(up.cycle_ready);
  EXPECT_EQ(s->state().phase, Phase::Transcribing);

  const auto r = s->complete_cycle();
  EXPECT_TRUE(r.error.empty());
  EXPECT_EQ(r.user_text, "good morning");
  EXPECT_EQ(r.reply, "Mugsy hears: good morning.§");
  EXPECT_EQ(r.segments, std::vector<std::string>{"Mugsy hears: good morning."});
  ASSERT_EQ(r.clips.size(), 1u);
  EXPECT_DOUBLE_EQ(r.metrics.input_duration_ms, 1500.0);
  EXPECT_EQ(s->state(), (SessionState{Phase::Tracking, 0u}));

  const auto h = s->histories().load(0);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.records()[0].text, "good morning");
  EXPECT_EQ(h.records()[1].text, "Mugsy hears: good morning.");
  EXPECT_EQ(h.records()[1].timestamp_ms, 2500);
  EXPECT_EQ(code_of([&] { s->complete_cycle(); }), Errc::InvalidState);

  std::set<std::string> types;
  for (const auto& e : bus.since(0)) types.insert(e.type);
  for (auto t : {"STATE", "DETECTION", "CONTROL", "TRANSCRIPT", "AUDIO_SEGMENT"}) EXPECT_TRUE(types.count(t)) << t;
  EXPECT_TRUE(bus.audio().get(0).has_value());
}

TEST_F(SessionTest, RecordingAutoStopsAndTrackingExpires) {
  auto s = open();
  acquaint(*s, 0, "mug");
  dialogue::TextMicrophone mic;
  mic.set_utterance("long story");
  s->focus(0);
  s->handle_wand({WandKind::TouchDown, 0}, mic);
  clock.set(29999ms);
  EXPECT_FALSE(s->tick(mic).cycle_ready);
  clock.set(30000ms);
  const auto stop = s->tick(mic);
  ASSERT_EQ(stop.controls.size(), 1u);
  EXPECT_EQ(stop.controls[0], (protocol::ControlMessage{ControlKind::VibrateOff, 0}));
  EXPECT_TRUE(stop.cycle_ready);
  EXPECT_DOUBLE_EQ(s->complete_cycle().metrics.input_duration_ms, 30000.0);

  // A late TOUCH_UP after the auto-stop changes nothing.
  EXPECT_TRUE(s->handle_wand({WandKind::TouchUp, 1}, mic).controls.empty());

  // Out of view: the speech finished while the object was gone, so IDLE.
  EXPECT_EQ(s->state().phase, Phase::Idle);
  s->focus(0);
  clock.set(31000ms);
  s->tick(mic);
  EXPECT_EQ(s->state().phase, Phase::Tracking);
  clock.set(31500ms);
  s->handle_frame(frame(650));  // nothing in view
  EXPECT_EQ(s->state().phase, Phase::Tracking);  // still within the grace period
  clock.set(33000ms);
  s->tick(mic);
  EXPECT_EQ(s->state().phase, Phase::Idle);
}

TEST_F(SessionTest, FailuresReturnToTrackingWithoutTouchingMemory) {
  auto s = open();
  acquaint(*s, 0, "mug");
  dialogue::TextMicrophone mic;
  auto run = [&](const std::string& said) {
    s->focus(0);
    s->handle_wand({WandKind::TouchDown, 0}, mic);
    mic.set_utterance(said);
    clock.advance(1000ms);
    s->handle_wand({WandKind::TouchUp, 1}, mic);
    return s->complete_cycle();
  };

  chat->fail = true;
  auto r = run("hello");
  EXPECT_NE(r.error.find("rate limited"), std::string::npos);
  EXPECT_EQ(s->state(), (SessionState{Phase::Tracking, 0u}));
  EXPECT_FALSE(fs::exists(s->histories().path_for(0)));

  chat->fail = false;
  chat->reply = " § ";
  r = run("hello");
  EXPECT_FALSE(r.error.empty());
  EXPECT_FALSE(fs::exists(s->histories().path_for(0)));

  chat->reply.clear();
  r = run("   ");
  EXPECT_TRUE(r.skipped);
  EXPECT_EQ(s->state(), (SessionState{Phase::Tracking, 0u}));
  EXPECT_FALSE(fs::exists(s->histories().path_for(0)));

  // Speech failure comes after the reply is complete: memory keeps it.
  caps.synthesizer = std::make_shared<FailingSynth>();
  auto mute = open();
  s = std::move(mute);
  r = run("can you hear me");
  EXPECT_FALSE(r.speech_ok);
  EXPECT_TRUE(r.clips.empty());
  EXPECT_EQ(s->histories().load(0).size(), 2u);
}

TEST_F(SessionTest, RunBondingCycleIgnoresTheStateMachine) {
  auto s = open();
  acquaint(*s, 0, "mug");
  dialogue::PcmAudio audio;
  audio.samples.resize(1600);
  audio.annotation = "hi";
  const auto r = s->run_bonding_cycle(audio, 0);
  EXPECT_EQ(r.segments.size(), 1u);
  EXPECT_EQ(s->state().phase, Phase::Idle);
  chat->fail = true;
  EXPECT_EQ(code_of([&] { s->run_bonding_cycle(audio, 0); }), Errc::BackendFailure);
  EXPECT_EQ(s->histories().load(0).size(), 2u);
  EXPECT_EQ(code_of([&] { s->run_bonding_cycle(audio, 7); }), Errc::NotFound);
}

TEST_F(SessionTest, ActiveObjectPrefersConfidenceThenCentre) {
  auto s = open();
  acquaint(*s, 0, "mug");
  acquaint(*s, 100, "plant");
  std::vector<vision::Detection> d = {{0, {0.2, 0.2, 0.1, 0.1}, 0.8, 0}, {1, {0.9, 0.9, 0.1, 0.1}, 0.9, 0}};
  s->observe(d);
  EXPECT_EQ(s->state().class_id, 1u);
  d = {{0, {0.5, 0.5, 0.1, 0.1}, 0.9, 0}, {1, {0.9, 0.9, 0.1, 0.1}, 0.9, 0}};
  s->observe(d);
  EXPECT_EQ(s->state().class_id, 0u);
  d = {{1, {0.5, 0.5, 0.1, 0.1}, 0.5, 0}};  // below threshold
  s->observe(d);
  EXPECT_EQ(s->state().class_id, 0u);
  EXPECT_EQ(s->registry().active(), 0u);
}

TEST_F(SessionTest, PersonaEditChangesTheVoice) {
  auto s = open();
  acquaint(*s, 0, "mug");
  const auto p = s->edit_persona(0, {{"name", "Cuppa"}, {"voice", "ELDERLY_MALE"}});
  EXPECT_EQ(p.name, "Cuppa");
  EXPECT_EQ(s->personas().load(0).voice, persona::VoiceId::ElderlyMale);
  dialogue::PcmAudio audio;
  audio.samples.resize(16);
  audio.annotation = "hi";
  const auto r = s->run_bonding_cycle(audio, 0);
  EXPECT_EQ(r.reply, "Cuppa hears: hi.§");
  backends::MockSynthesizer synth(clock);
  EXPECT_EQ(r.clips[0].samples, synth.synthesize(r.segments[0], persona::VoiceId::ElderlyMale,
                                                 persona::Language::English));
  EXPECT_EQ(code_of([&] { s->edit_persona(0, {{"mood", "x"}}); }), Errc::UnknownField);
  EXPECT_EQ(code_of([&] { s->edit_persona(3, {{"name", "x"}}); }), Errc::NotFound);
}

}  // namespace
}  // namespace objvoice::orchestrator
