#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "objvoice/backends/capabilities.hpp"
#include "objvoice/clock.hpp"
#include "objvoice/protocol/endpoint.hpp"

// JSON-over-HTTP adapters for remote inference services.
//
// Routes and payloads (all POST, UTF-8 JSON; images are base64 PNG, audio is
// base64 16 kHz mono WAV):
//
//   /segment  {image_b64}                           -> {masks: [{saliency, rle}]}
//   /train    {class_names, epochs, patience, pretrained, samples: [{split,
//              class_id, bbox: [cx,cy,w,h], image_b64}]}
//                                                   -> {id, epochs_run, best_epoch}
//   /detect   {model_id, image_b64}                 -> {detections: [{class_id,
//                                                        bbox, confidence}]}
//   /persona  {image_b64, language, prompt}         -> persona document
//   /stt      {audio_b64, language}                 -> {text}
//   /chat     chat request document                 -> {text}
//   /tts      {text, voice, language}               -> {audio_b64}
//
// `rle` lists alternating run lengths over the row-major mask, starting with
// a run of unset pixels (possibly 0).
namespace objvoice::backends {

enum class BackendKind { Mock, Http };

std::string_view to_string(BackendKind kind);  // "MOCK" / "HTTP"
std::optional<BackendKind> parse_backend_kind(std::string_view text);  // case-insensitive

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::optional<protocol::Endpoint> endpoint;
  // Name of the environment variable holding a bearer key; empty for none.
  std::string api_key_env;
  int timeout_ms = 10000;
  int retries = 2;

  // Throws Error(InvalidArgument): HTTP without endpoint, negative retries,
  // non-positive timeout.
  void validate() const;
};

inline constexpr std::array<std::string_view, 7> kCapabilitySlots = {
    "segmenter", "trainer", "detector", "persona_generator", "transcriber", "chat", "synthesizer"};

struct BackendsConfig {
  std::array<BackendConfig, kCapabilitySlots.size()> slots;

  // Throws Error(InvalidArgument) for unknown slot names.
  BackendConfig& at(std::string_view slot);
  const BackendConfig& at(std::string_view slot) const;

  static BackendsConfig all(const BackendConfig& config);
};

// Builds the capability set: MOCK slots get the deterministic mocks, HTTP
// slots get adapters. Mock models are written under models_root.
CapabilitySet make_capabilities(const BackendsConfig& config, Clock& clock,
                                const std::filesystem::path& models_root);

inline constexpr std::chrono::milliseconds kRetryBase{250};

// POSTs `request` to `route` and returns the parsed JSON reply. Transport
// failures and 5xx replies are retried up to config.retries times, waiting
// kRetryBase * 2^attempt on `clock` between attempts.
// Throws Error(Timeout | TransportError | SchemaError) or RemoteError.
nlohmann::json http_call(const BackendConfig& config, std::string_view route,
                         const nlohmann::json& request, Clock& clock);

// Payload helpers shared by the adapters and by servers implementing the routes.
std::string encode_image_b64(const protocol::ScopeFrame& frame);
// Sequence and timestamp are zero. Throws Error(SchemaError).
protocol::ScopeFrame decode_image_b64(std::string_view text);
std::vector<std::uint32_t> encode_mask_rle(const vision::Mask& mask);
// Throws Error(SchemaError) when the runs do not cover width*height exactly.
vision::Mask decode_mask_rle(int width, int height, std::span<const std::uint32_t> runs);

class HttpSegmenter final : public Segmenter {
 public:
  HttpSegmenter(BackendConfig config, Clock& clock) : config_(std::move(config)), clock_(clock) {}
  std::vector<vision::MaskCandidate> segment(const protocol::ScopeFrame& frame) override;

 private:
  BackendConfig config_;
  Clock& clock_;
};

// Models trained remotely are referenced by id only; location stays empty.
class HttpTrainer final : public Trainer {
 public:
  HttpTrainer(BackendConfig config, Clock& clock) : config_(std::move(config)), clock_(clock) {}
  vision::ModelHandle train(const vision::Dataset& dataset, const TrainOptions& options,
                            const vision::ModelHandle* pretrained) override;

 private:
  BackendConfig config_;
  Clock& clock_;
};

class HttpDetector final : public Detector {
 public:
  HttpDetector(BackendConfig config, Clock& clock) : config_(std::move(config)), clock_(clock) {}
  std::vector<vision::Detection> detect(const protocol::ScopeFrame& frame,
                                        const vision::ModelHandle& model) override;

 private:
  BackendConfig config_;
  Clock& clock_;
};

class HttpPersonaGenerator final : public PersonaGenerator {
 public:
  HttpPersonaGenerator(BackendConfig config, Clock& clock)
      : config_(std::move(config)), clock_(clock) {}
  std::string generate(const PersonaRequest& request) override;

 private:
  BackendConfig config_;
  Clock& clock_;
};

class HttpTranscriber final : public Transcriber {
 public:
  HttpTranscriber(BackendConfig config, Clock& clock) : config_(std::move(config)), clock_(clock) {}
  std::string transcribe(const dialogue::PcmAudio& audio, persona::Language language) override;

 private:
  BackendConfig config_;
  Clock& clock_;
};

class HttpChat final : public ChatModel {
 public:
  HttpChat(BackendConfig config, Clock& clock) : config_(std::move(config)), clock_(clock) {}
  std::string complete(const dialogue::ChatRequest& request) override;

 private:
  BackendConfig config_;
  Clock& clock_;
};

class HttpSynthesizer final : public Synthesizer {
 public:
  HttpSynthesizer(BackendConfig config, Clock& clock) : config_(std::move(config)), clock_(clock) {}
  std::vector<std::int16_t> synthesize(std::string_view text, persona::VoiceId voice,
                                       persona::Language language) override;

 private:
  BackendConfig config_;
  Clock& clock_;
};

}  // namespace objvoice::backends
