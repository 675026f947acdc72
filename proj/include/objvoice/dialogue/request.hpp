#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "objvoice/dialogue/history.hpp"
#include "objvoice/persona/persona.hpp"

namespace objvoice::dialogue {

inline constexpr std::string_view kDefaultMarker = "\xC2\xA7";  // "§"

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

// Chat-completion request. `persona_name`, `language` and `marker` ride
// along as metadata so adapters and mocks need not parse the system prompt.
struct ChatRequest {
  std::vector<ChatMessage> messages;
  std::string persona_name;
  persona::Language language = persona::Language::English;
  std::string marker{kDefaultMarker};
  double temperature = 0.7;
  int max_tokens = 256;

  // {"messages":[...],"temperature":..,"max_tokens":..,"metadata":{...}}
  std::string to_document() const;
  // Throws Error(ParseError).
  static ChatRequest from_document(std::string_view document);
};

// System prompt in the persona's language, including the instruction to
// place `marker` at sentence ends and breathing pauses.
std::string render_system_prompt(const persona::Persona& persona, std::string_view marker);

// [system, history..., user]; USER records map to "user", OBJECT to "assistant".
ChatRequest build_chat_request(const persona::Persona& persona, const ChatHistory& history,
                               std::string_view user_text,
                               std::string_view marker = kDefaultMarker);

}  // namespace objvoice::dialogue
