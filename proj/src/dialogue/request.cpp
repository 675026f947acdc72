#include "objvoice/dialogue/request.hpp"

#include <json.hpp>

#include "objvoice/error.hpp"

namespace objvoice::dialogue {

namespace {

constexpr std::string_view kTemplateEn =
    "You are {name}, an everyday object that has come to life and is talking with the person "
    "who owns you.\n"
    "Gender: {gender}\n"
    "Age: {age}\n"
    "Personality: {personality}\n"
    "Background story: {backstory}\n"
    "Stay in character. Answer in English in a warm, conversational tone and keep replies "
    "short.\n"
    "Insert the marker \"{marker}\" at the end of every sentence and at natural breathing "
    "pauses. Never explain the marker.";

constexpr std::string_view kTemplateZh =
    "你是{name}，一件被赋予了生命、正在与主人对话的日常物品。\n"
    "性别：{gender}\n"
    "年龄：{age}\n"
    "性格：{personality}\n"
    "背景故事：{backstory}\n"
    "请始终保持角色，用中文以温暖、口语化的语气简短回答。\n"
    "在每句话结尾以及自然的停顿处插入标记\"{marker}\"，不要解释这个标记。";

void replace_all(std::string& text, std::string_view key, std::string_view value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos;
       pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
}

}  // namespace

std::string render_system_prompt(const persona::Persona& p, std::string_view marker) {
  std::string out(p.language == persona::Language::Chinese ? kTemplateZh : kTemplateEn);
  // {marker} last so persona text containing "{...}" is never re-expanded into it.
  replace_all(out, "{name}", p.name);
  replace_all(out, "{gender}", p.gender);
  replace_all(out, "{age}", p.age);
  replace_all(out, "{personality}", p.personality);
  replace_all(out, "{backstory}", p.backstory);
  replace_all(out, "{marker}", marker);
  return out;
}

ChatRequest build_chat_request(const persona::Persona& persona, const ChatHistory& history,
                               std::string_view user_text, std::string_view marker) {
  ChatRequest req;
  req.persona_name = persona.name;
  req.language = persona.language;
  req.marker = std::string(marker);
  req.messages.push_back({"system", render_system_prompt(persona, marker)});
  for (const auto& r : history.records()) {
    req.messages.push_back({r.role == Role::User ? "user" : "assistant", r.text});
  }
  req.messages.push_back({"user", std::string(user_text)});
  return req;
}

std::string ChatRequest::to_document() const {
  nlohmann::ordered_json doc;
  doc["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    doc["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  doc["temperature"] = temperature;
  doc["max_tokens"] = max_tokens;
  doc["metadata"] = {{"persona_name", persona_name},
                     {"language", std::string(persona::to_string(language))},
                     {"marker", marker}};
  return doc.dump();
}

ChatRequest ChatRequest::from_document(std::string_view document) {
  ChatRequest req;
  try {
    auto doc = nlohmann::json::parse(document);
    for (const auto& m : doc.at("messages")) {
      req.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    }
    req.temperature = doc.value("temperature", 0.7);
    req.max_tokens = doc.value("max_tokens", 256);
    if (doc.contains("metadata")) {
      const auto& meta = doc["metadata"];
      req.persona_name = meta.value("persona_name", "");
      req.marker = meta.value("marker", std::string(kDefaultMarker));
      auto lang = persona::parse_language(meta.value("language", "en"));
      if (!lang) throw Error(Errc::ParseError, "unknown language in chat metadata");
      req.language = *lang;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
  if (req.messages.empty()) throw Error(Errc::ParseError, "chat request has no messages");
  return req;
}

}  // namespace objvoice::dialogue
