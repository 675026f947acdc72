#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace objvoice::persona {

// The seven selectable voices.
enum class VoiceId {
  ElderlyFemale,
  YoungFemale,
  ChildFemale,
  ElderlyMale,
  YoungMale,
  ChildMale,
  Neutral,
};

inline constexpr std::array<VoiceId, 7> kAllVoices = {
    VoiceId::ElderlyFemale, VoiceId::YoungFemale, VoiceId::ChildFemale, VoiceId::ElderlyMale,
    VoiceId::YoungMale,     VoiceId::ChildMale,   VoiceId::Neutral,
};

std::string_view to_string(VoiceId voice);
std::optional<VoiceId> parse_voice(std::string_view name);

enum class Language { English, Chinese };

std::string_view to_string(Language lang);  // "en" / "zh"
std::optional<Language> parse_language(std::string_view code);

struct Persona {
  std::string name;
  std::string gender;
  std::string age;
  std::string personality;
  std::string backstory;
  VoiceId voice = VoiceId::Neutral;
  Language language = Language::English;

  friend bool operator==(const Persona&, const Persona&) = default;
};

// Key order of the canonical document.
inline constexpr std::array<std::string_view, 7> kPersonaFields = {
    "name", "gender", "age", "personality", "backstory", "voice", "language"};

// Parses and checks a persona document. Throws Error with ParseError,
// MissingField (detail = field name), InvalidVoice or InvalidLanguage.
// Keys outside the schema are ignored.
Persona validate_persona(std::string_view document);

// Canonical document: schema keys in fixed order, two-space indent,
// UTF-8 kept verbatim, trailing newline.
std::string to_document(const Persona& persona);

// Applies field overrides by schema name. Throws UnknownField, InvalidVoice,
// InvalidLanguage or MissingField (empty name).
Persona edit_persona(const Persona& persona, const std::map<std::string, std::string>& overrides);

}  // namespace objvoice::persona
