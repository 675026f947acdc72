#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace objvoice::dialogue {

inline constexpr int kSampleRate = 16000;

// 16-bit mono PCM. `annotation` travels in a private "utxt" RIFF chunk when
// the audio is serialized as WAV; the simulated microphone uses it to carry
// the text of what was "spoken".
struct PcmAudio {
  std::vector<std::int16_t> samples;
  std::string annotation;
  int sample_rate = kSampleRate;

  double duration_ms() const {
    return static_cast<double>(samples.size()) * 1000.0 / sample_rate;
  }
};

// One synthesized response segment.
struct AudioClip {
  std::size_t segment_index = 0;
  std::vector<std::int16_t> samples;
  double synth_ms = 0.0;

  double duration_ms() const { return static_cast<double>(samples.size()) * 1000.0 / kSampleRate; }
};

std::vector<std::uint8_t> encode_wav(const PcmAudio& audio);
// Accepts PCM16 mono files; throws Error(ParseError) on anything else.
PcmAudio decode_wav(std::span<const std::uint8_t> bytes);

void write_wav(const std::filesystem::path& path, const PcmAudio& audio);

}  // namespace objvoice::dialogue
