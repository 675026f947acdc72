#include "objvoice/persona/persona.hpp"

#include <json.hpp>

#include "objvoice/error.hpp"

namespace objvoice::persona {

std::string_view to_string(VoiceId voice) {
  switch (voice) {
    case VoiceId::ElderlyFemale: return "ELDERLY_FEMALE";
    case VoiceId::YoungFemale: return "YOUNG_FEMALE";
    case VoiceId::ChildFemale: return "CHILD_FEMALE";
    case VoiceId::ElderlyMale: return "ELDERLY_MALE";
    case VoiceId::YoungMale: return "YOUNG_MALE";
    case VoiceId::ChildMale: return "CHILD_MALE";
    case VoiceId::Neutral: return "NEUTRAL";
  }
  return "?";
}

std::optional<VoiceId> parse_voice(std::string_view name) {
  for (VoiceId v : kAllVoices) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view to_string(Language lang) { return lang == Language::Chinese ? "zh" : "en"; }

std::optional<Language> parse_language(std::string_view code) {
  if (code == "en") return Language::English;
  if (code == "zh") return Language::Chinese;
  return std::nullopt;
}

namespace {

std::string string_field(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) throw Error(Errc::MissingField, key);
  if (!it->is_string()) throw Error(Errc::ParseError, std::string(key) + " must be a string");
  return it->get<std::string>();
}

}  // namespace

Persona validate_persona(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ParseError, "persona document must be an object");

  Persona p;
  p.name = string_field(doc, "name");
  if (p.name.empty()) throw Error(Errc::MissingField, "name");
  p.gender = string_field(doc, "gender");
  p.age = string_field(doc, "age");
  p.personality = string_field(doc, "personality");
  p.backstory = string_field(doc, "backstory");

  const std::string voice = string_field(doc, "voice");
  auto v = parse_voice(voice);
  if (!v) throw Error(Errc::InvalidVoice, voice);
  p.voice = *v;

  const std::string lang = string_field(doc, "language");
  auto l = parse_language(lang);
  if (!l) throw Error(Errc::InvalidLanguage, lang);
  p.language = *l;
  return p;
}

std::string to_document(const Persona& p) {
  nlohmann::ordered_json doc;
  doc["name"] = p.name;
  doc["gender"] = p.gender;
  doc["age"] = p.age;
  doc["personality"] = p.personality;
  doc["backstory"] = p.backstory;
  doc["voice"] = std::string(to_string(p.voice));
  doc["language"] = std::string(to_string(p.language));
  return doc.dump(2) + "\n";
}

Persona edit_persona(const Persona& persona, const std::map<std::string, std::string>& overrides) {
  Persona out = persona;
  for (const auto& [key, value] : overrides) {
    if (key == "name") {
      if (value.empty()) throw Error(Errc::MissingField, "name");
      out.name = value;
    } else if (key == "gender") {
      out.gender = value;
    } else if (key == "age") {
      out.age = value;
    } else if (key == "personality") {
      out.personality = value;
    } else if (key == "backstory") {
      out.backstory = value;
    } else if (key == "voice") {
      auto v = parse_voice(value);
      if (!v) throw Error(Errc::InvalidVoice, value);
      out.voice = *v;
    } else if (key == "language") {
      auto l = parse_language(value);
      if (!l) throw Error(Errc::InvalidLanguage, value);
      out.language = *l;
    } else {
      throw Error(Errc::UnknownField, key);
    }
  }
  return out;
}

}  // namespace objvoice::persona
