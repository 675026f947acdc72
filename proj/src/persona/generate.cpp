#include "objvoice/persona/generate.hpp"

#include "objvoice/error.hpp"

namespace objvoice::persona {

namespace {

constexpr std::string_view kPromptEn =
    "Look at the object in this picture and imagine it has come alive. Create an "
    "anthropomorphic persona for it that fits its appearance, material and everyday use.\n"
    "Reply with a single JSON object and nothing else, using exactly these keys:\n"
    "  \"name\": a short, friendly name for the object;\n"
    "  \"gender\": the gender it presents as;\n"
    "  \"age\": how old it feels, in words;\n"
    "  \"personality\": one paragraph describing its character and way of speaking;\n"
    "  \"backstory\": one paragraph telling its background story;\n"
    "  \"voice\": the voice that suits it best, one of ELDERLY_FEMALE, YOUNG_FEMALE, "
    "CHILD_FEMALE, ELDERLY_MALE, YOUNG_MALE, CHILD_MALE, NEUTRAL;\n"
    "  \"language\": \"en\".\n"
    "Write every value in English.";

constexpr std::string_view kPromptZh =
    "请观察图片中的物品，想象它拥有了生命。根据它的外观、材质和日常用途，为它创造一个拟人化的角色。\n"
    "只回复一个 JSON 对象，且只使用以下键：\n"
    "  \"name\"：物品简短亲切的名字；\n"
    "  \"gender\"：它呈现的性别；\n"
    "  \"age\"：用文字描述它给人的年龄感；\n"
    "  \"personality\"：一段描述其性格和说话方式的文字；\n"
    "  \"backstory\"：一段讲述其背景故事的文字；\n"
    "  \"voice\"：最适合它的声音，取值为 ELDERLY_FEMALE、YOUNG_FEMALE、CHILD_FEMALE、"
    "ELDERLY_MALE、YOUNG_MALE、CHILD_MALE、NEUTRAL 之一；\n"
    "  \"language\"：\"zh\"。\n"
    "除 voice 与 language 外，所有值请用中文书写。";

}  // namespace

std::string_view persona_prompt(Language language) {
  return language == Language::Chinese ? kPromptZh : kPromptEn;
}

Persona generate_persona(const protocol::ScopeFrame& frame, Language language,
                         backends::PersonaGenerator& generator) {
  const backends::PersonaRequest request{frame, language, persona_prompt(language)};
  std::string last_problem;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string document;
    try {
      document = generator.generate(request);
    } catch (const std::exception& e) {
      throw Error(Errc::BackendFailure, std::string("persona generator: ") + e.what());
    }
    try {
      Persona p = validate_persona(document);
      if (p.language != language) {
        last_problem = "generated language " + std::string(to_string(p.language)) +
                       ", requested " + std::string(to_string(language));
        continue;
      }
      return p;
    } catch (const Error& e) {
      last_problem = e.what();
    }
  }
  throw Error(Errc::InvalidGeneration, last_problem);
}

}  // namespace objvoice::persona
