#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "objvoice/backends/capabilities.hpp"
#include "objvoice/clock.hpp"
#include "objvoice/util/rgb_tile.hpp"

// Deterministic desk-scale stand-ins for every capability. Each mock is a
// pure function of its inputs (and construction parameters).
namespace objvoice::backends {

// Objects are the strongly saturated regions of a frame; each 8-connected
// saturated component becomes a candidate whose saliency is its area share.
class MockSegmenter final : public Segmenter {
 public:
  struct Options {
    int min_saturation = 90;   // OpenCV HSV scale, 0..255
    int min_value = 40;
    int min_area = 64;         // pixels
    std::size_t max_candidates = 4;
  };

  MockSegmenter() = default;
  explicit MockSegmenter(Options options) : options_(options) {}

  std::vector<vision::MaskCandidate> segment(const protocol::ScopeFrame& frame) override;

 private:
  Options options_;
};

struct ClassTemplate {
  std::uint32_t class_id = 0;
  util::RgbTile tile;
};

// Normalized cross-correlation of every template against the frame, with
// the template and window means removed per channel (TM_CCOEFF_NORMED). One detection per template at its
// best-scoring position; confidence is the correlation score clamped to
// [0, 1]; sorted by descending confidence.
std::vector<vision::Detection> mock_detector_match(const protocol::ScopeFrame& frame,
                                                   std::span<const ClassTemplate> templates);

// "Training" crops one template per class out of the training split and
// stores them as the model's artifacts under models_root/<model id>/.
// Epoch bookkeeping follows a fixed pseudo validation curve so that the
// budget and patience are honored deterministically.
class MockTrainer final : public Trainer {
 public:
  explicit MockTrainer(std::filesystem::path models_root) : models_root_(std::move(models_root)) {}

  vision::ModelHandle train(const vision::Dataset& dataset, const TrainOptions& options,
                            const vision::ModelHandle* pretrained) override;

 private:
  std::filesystem::path models_root_;
};

std::vector<ClassTemplate> load_templates(const vision::ModelHandle& model);

// Template matcher over a MockTrainer model. Charges a modeled inference cost
// to the clock so detection latency is deterministic under a virtual clock.
class MockDetector final : public Detector {
 public:
  struct Cost {
    double base_ms = 2.5;
    double per_class_ms = 0.5;
  };

  explicit MockDetector(Clock& clock) : clock_(clock) {}
  MockDetector(Clock& clock, Cost cost) : clock_(clock), cost_(cost) {}

  std::vector<vision::Detection> detect(const protocol::ScopeFrame& frame,
                                        const vision::ModelHandle& model) override;

 private:
  std::shared_ptr<const std::vector<ClassTemplate>> templates_for(const vision::ModelHandle& model);

  Clock& clock_;
  Cost cost_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const std::vector<ClassTemplate>>> cache_;
};

// Rule table keyed by the dominant hue of the saturated pixels in the frame.
class MockPersonaGenerator final : public PersonaGenerator {
 public:
  std::string generate(const PersonaRequest& request) override;
};

// Index (0..11) of the 15-degree hue bin holding most saturated pixels, or
// -1 when the frame has no saturated pixels.
int dominant_hue_bin(const protocol::ScopeFrame& frame);

// Returns the text the simulated microphone embedded in the recording.
class MockTranscriber final : public Transcriber {
 public:
  std::string transcribe(const dialogue::PcmAudio& audio, persona::Language language) override;
};

// Echo model. English: "<name> hears: <last user text>.§", plus
// "I remember <n> earlier messages.§" when the request carries history.
// With `sentences` > 0 it instead answers with exactly that many sentences.
class MockChat final : public ChatModel {
 public:
  MockChat() = default;
  explicit MockChat(std::size_t sentences) : sentences_(sentences) {}

  std::string complete(const dialogue::ChatRequest& request) override;

 private:
  std::size_t sentences_ = 0;
};

// Sine tone, 60 ms of audio per character, whose pitch identifies the voice.
// Charges synth_ms_per_char of synthesis time per character to the clock.
class MockSynthesizer final : public Synthesizer {
 public:
  static constexpr int kSamplesPerChar = 960;           // 60 ms at 16 kHz
  static constexpr double kDefaultSynthMsPerChar = 37.782;

  explicit MockSynthesizer(Clock& clock, double synth_ms_per_char = kDefaultSynthMsPerChar)
      : clock_(clock), synth_ms_per_char_(synth_ms_per_char) {}

  std::vector<std::int16_t> synthesize(std::string_view text, persona::VoiceId voice,
                                       persona::Language language) override;

  static double frequency_hz(persona::VoiceId voice);
  double analytic_rtf() const { return synth_ms_per_char_ / 60.0; }

 private:
  Clock& clock_;
  double synth_ms_per_char_;
};

// All seven mock slots. Models are written under models_root.
CapabilitySet make_mock_capabilities(Clock& clock, const std::filesystem::path& models_root);

}  // namespace objvoice::backends
