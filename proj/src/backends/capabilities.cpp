#include "objvoice/backends/capabilities.hpp"

namespace objvoice::backends {

std::vector<std::string> CapabilitySet::missing() const {
  std::vector<std::string> out;
  if (!segmenter) out.emplace_back("segmenter");
  if (!trainer) out.emplace_back("trainer");
  if (!detector) out.emplace_back("detector");
  if (!persona_generator) out.emplace_back("persona_generator");
  if (!transcriber) out.emplace_back("transcriber");
  if (!chat) out.emplace_back("chat");
  if (!synthesizer) out.emplace_back("synthesizer");
  return out;
}

}  // namespace objvoice::backends
