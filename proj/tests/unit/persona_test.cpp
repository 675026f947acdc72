#include <gtest/gtest.h>

#include <json.hpp>

#include "objvoice/backends/mock.hpp"
#include "objvoice/devsim/sprites.hpp"
#include "objvoice/error.hpp"
#include "objvoice/persona/generate.hpp"
#include "objvoice/persona/persona.hpp"
#include "objvoice/persona/store.hpp"
#include "test_support.hpp"

namespace objvoice::persona {
namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidState;
}

const char* kValid = R"({"name":"Cuppie","gender":"female","age":"young","personality":"warm",
  "backstory":"Born in a kiln.","voice":"YOUNG_FEMALE","language":"en"})";

TEST(Persona, VoiceNamesRoundTrip) {
  EXPECT_EQ(kAllVoices.size(), 7u);
  for (auto v : kAllVoices) EXPECT_EQ(parse_voice(to_string(v)), v);
  EXPECT_EQ(to_string(VoiceId::ElderlyFemale), "ELDERLY_FEMALE");
  EXPECT_FALSE(parse_voice("young_female").has_value());
  EXPECT_FALSE(parse_voice("ROBOT").has_value());
  EXPECT_EQ(parse_language("zh"), Language::Chinese);
  EXPECT_FALSE(parse_language("fr").has_value());
}

TEST(Persona, ValidateAcceptsSchemaAndIgnoresExtras) {
  auto doc = nlohmann::json::parse(kValid);
  doc["favourite_color"] = "blue";
  const auto p = validate_persona(doc.dump());
  EXPECT_EQ(p.name, "Cuppie");
  EXPECT_EQ(p.voice, VoiceId::YoungFemale);
  EXPECT_EQ(p.language, Language::English);
}

TEST(Persona, ValidateErrors) {
  EXPECT_EQ(code_of([] { validate_persona("{not json"); }), Errc::ParseError);
  EXPECT_EQ(code_of([] { validate_persona("[]"); }), Errc::ParseError);
  for (const char* field : {"name", "gender", "age", "personality", "backstory", "voice", "language"}) {
    auto doc = nlohmann::json::parse(kValid);
    doc.erase(field);
    try {
      validate_persona(doc.dump());
      FAIL() << field;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::MissingField);
      EXPECT_EQ(e.detail(), field);
    }
  }
  auto doc = nlohmann::json::parse(kValid);
  doc["voice"] = "ROBOT";
  EXPECT_EQ(code_of([&] { validate_persona(doc.dump()); }), Errc::InvalidVoice);
  doc = nlohmann::json::parse(kValid);
  doc["language"] = "fr";
  EXPECT_EQ(code_of([&] { validate_persona(doc.dump()); }), Errc::InvalidLanguage);
  doc = nlohmann::json::parse(kValid);
  doc["name"] = "";
  EXPECT_EQ(code_of([&] { validate_persona(doc.dump()); }), Errc::MissingField);
}

TEST(Persona, CanonicalDocumentOrderAndUtf8) {
  Persona p;
  p.name = "杯杯";
  p.gender = "男";
  p.age = "年轻";
  p.personality = "热情";
  p.backstory = "来自景德镇。";
  p.voice = VoiceId::YoungMale;
  p.language = Language::Chinese;
  const auto doc = to_document(p);
  EXPECT_EQ(doc.back(), '\n');
  EXPECT_NE(doc.find("杯杯"), std::string::npos);  // not \u-escaped
  std::size_t last = 0;
  for (auto key : kPersonaFields) {
    const auto pos = doc.find("\"" + std::string(key) + "\"");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_GT(pos, last);
    last = pos;
  }
  EXPECT_EQ(validate_persona(doc), p);
}

TEST(Persona, EditOverrides) {
  const auto p = validate_persona(kValid);
  const auto e = edit_persona(p, {{"name", "Mugsy"}, {"voice", "NEUTRAL"}});
  EXPECT_EQ(e.name, "Mugsy");
  EXPECT_EQ(e.voice, VoiceId::Neutral);
  EXPECT_EQ(e.backstory, p.backstory);
  EXPECT_EQ(code_of([&] { edit_persona(p, {{"mood", "x"}}); }), Errc::UnknownField);
  EXPECT_EQ(code_of([&] { edit_persona(p, {{"voice", "x"}}); }), Errc::InvalidVoice);
  EXPECT_EQ(code_of([&] { edit_persona(p, {{"language", "x"}}); }), Errc::InvalidLanguage);
  EXPECT_EQ(code_of([&] { edit_persona(p, {{"name", ""}}); }), Errc::MissingField);
}

TEST(PersonaStore, RoundTripAndMissing) {
  testing::TempDir dir;
  PersonaStore store(dir.path());
  util::Rng rng(8);
  const auto p = testing::random_persona(rng);
  const auto path = store.store(3, p);
  EXPECT_EQ(path, dir.path() / "personas" / "3.json");
  EXPECT_TRUE(store.contains(3));
  EXPECT_EQ(store.load(3), p);
  EXPECT_EQ(code_of([&] { store.load(4); }), Errc::NotFound);
  store.remove(3);
  EXPECT_FALSE(store.contains(3));
}

TEST(PersonaStore, SeesWritesFromAnotherStore) {
  testing::TempDir dir;
  PersonaStore a(dir.path()), b(dir.path());
  util::Rng rng(81);
  const auto p = testing::random_persona(rng);
  a.store(0, p);
  EXPECT_EQ(b.load(0), p);
  auto q = p;
  q.name += " the second, much longer";
  a.store(0, q);
  EXPECT_EQ(b.load(0), q);
  a.remove(0);
  EXPECT_EQ(code_of([&] { b.load(0); }), Errc::NotFound);
  EXPECT_EQ(code_of([&] { a.load(0); }), Errc::NotFound);
}

TEST(PersonaStore, ConcurrentWritersLeaveAValidDocument) {
  testing::TempDir dir;
  PersonaStore store(dir.path());
  util::Rng rng(9);
  std::vector<Persona> ps;
  for (int i = 0; i < 8; ++i) ps.push_back(testing::random_persona(rng));
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) store.store(0, ps[(t * 2 + i) % ps.size()]);
    });
  }
  for (auto& t : threads) t.join();
  const auto got = store.load(0);
  EXPECT_NE(std::find(ps.begin(), ps.end(), got), ps.end());
}

class ScriptedGenerator final : public backends::PersonaGenerator {
 public:
  std::vector<std::string> replies;
  std::size_t calls = 0;
  std::string generate(const backends::PersonaRequest& req) override {
    prompts.emplace_back(req.prompt);
    if (replies.empty()) throw std::runtime_error("offline");
    return replies[std::min(calls++, replies.size() - 1)];
  }
  std::vector<std::string> prompts;
};

TEST(Generate, RetriesOnceThenFails) {
  const auto frame = testing::plain_frame();
  ScriptedGenerator g;
  g.replies = {"garbage", kValid};
  EXPECT_EQ(generate_persona(frame, Language::English, g).name, "Cuppie");
  EXPECT_EQ(g.calls, 2u);
  EXPECT_EQ(g.prompts[0], persona_prompt(Language::English));

  ScriptedGenerator bad;
  bad.replies = {"garbage"};
  EXPECT_EQ(code_of([&] { generate_persona(frame, Language::English, bad); }), Errc::InvalidGeneration);
  EXPECT_EQ(bad.calls, 2u);

  ScriptedGenerator wrong_lang;
  wrong_lang.replies = {kValid};
  EXPECT_EQ(code_of([&] { generate_persona(frame, Language::Chinese, wrong_lang); }),
            Errc::InvalidGeneration);

  ScriptedGenerator offline;
  EXPECT_EQ(code_of([&] { generate_persona(frame, Language::English, offline); }), Errc::BackendFailure);
}

TEST(Generate, MockRuleTableFollowsHue) {
  backends::MockPersonaGenerator gen;
  auto frame = testing::plain_frame();
  const auto sprite = devsim::make_sprite("mug");
  for (int y = 0; y < sprite.height; ++y)
    std::copy_n(sprite.rgb.data() + y * sprite.width * 3, sprite.width * 3,
                frame.pixels.data() + (static_cast<std::size_t>(y + 100) * 320 + 100) * 3);
  EXPECT_EQ(backends::dominant_hue_bin(frame), 0);
  const auto en = generate_persona(frame, Language::English, gen);
  EXPECT_EQ(en.name, "Mugsy");
  EXPECT_EQ(en.voice, VoiceId::YoungMale);
  const auto zh = generate_persona(frame, Language::Chinese, gen);
  EXPECT_EQ(zh.name, "杯杯");
  EXPECT_EQ(zh.language, Language::Chinese);
  EXPECT_EQ(backends::dominant_hue_bin(testing::plain_frame()), -1);
  EXPECT_EQ(generate_persona(testing::plain_frame(), Language::English, gen).name, "Pebble");
}

}  // namespace
}  // namespace objvoice::persona
