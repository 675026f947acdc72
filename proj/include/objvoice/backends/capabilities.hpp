#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "objvoice/dialogue/audio.hpp"
#include "objvoice/dialogue/request.hpp"
#include "objvoice/persona/persona.hpp"
#include "objvoice/protocol/frame.hpp"
#include "objvoice/vision/dataset.hpp"
#include "objvoice/vision/geometry.hpp"
#include "objvoice/vision/model.hpp"

// The pluggable model boundary. Every capability the engine needs from a
// model lives behind one of these interfaces; implementations must tolerate
// concurrent calls.
namespace objvoice::backends {

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::vector<vision::MaskCandidate> segment(const protocol::ScopeFrame& frame) = 0;
};

struct TrainOptions {
  int epochs = 100;
  int patience = 25;
};

class Trainer {
 public:
  virtual ~Trainer() = default;
  // `pretrained` is the previous model when a class is added incrementally.
  virtual vision::ModelHandle train(const vision::Dataset& dataset, const TrainOptions& options,
                                    const vision::ModelHandle* pretrained) = 0;
};

class Detector {
 public:
  virtual ~Detector() = default;
  // Raw detections; thresholding, ordering and timing are applied by the caller.
  virtual std::vector<vision::Detection> detect(const protocol::ScopeFrame& frame,
                                                const vision::ModelHandle& model) = 0;
};

struct PersonaRequest {
  const protocol::ScopeFrame& frame;
  persona::Language language;
  std::string_view prompt;
};

class PersonaGenerator {
 public:
  virtual ~PersonaGenerator() = default;
  // Returns the persona document as produced by the model (unvalidated).
  virtual std::string generate(const PersonaRequest& request) = 0;
};

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual std::string transcribe(const dialogue::PcmAudio& audio, persona::Language language) = 0;
};

class ChatModel {
 public:
  virtual ~ChatModel() = default;
  virtual std::string complete(const dialogue::ChatRequest& request) = 0;
};

class Synthesizer {
 public:
  virtual ~Synthesizer() = default;
  virtual std::vector<std::int16_t> synthesize(std::string_view text, persona::VoiceId voice,
                                               persona::Language language) = 0;
};

// One configured backend per capability.
struct CapabilitySet {
  std::shared_ptr<Segmenter> segmenter;
  std::shared_ptr<Trainer> trainer;
  std::shared_ptr<Detector> detector;
  std::shared_ptr<PersonaGenerator> persona_generator;
  std::shared_ptr<Transcriber> transcriber;
  std::shared_ptr<ChatModel> chat;
  std::shared_ptr<Synthesizer> synthesizer;

  bool complete() const {
    return segmenter && trainer && detector && persona_generator && transcriber && chat &&
           synthesizer;
  }
  // Names of the empty slots, for error messages.
  std::vector<std::string> missing() const;
};

}  // namespace objvoice::backends
