#pragma once

#include <string_view>

#include "objvoice/backends/capabilities.hpp"
#include "objvoice/persona/persona.hpp"
#include "objvoice/protocol/frame.hpp"

namespace objvoice::persona {

inline constexpr std::string_view kPersonaPromptVersion = "persona-prompt/1";

// Prompt sent verbatim with the captured frame.
std::string_view persona_prompt(Language language);

// Asks the generator for a persona of the object in `frame`. Output that
// fails the schema (or answers in the wrong language) is retried once and
// then reported as Error(InvalidGeneration); generator exceptions surface
// as Error(BackendFailure).
Persona generate_persona(const protocol::ScopeFrame& frame, Language language,
                         backends::PersonaGenerator& generator);

}  // namespace objvoice::persona
