#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "objvoice/backends/capabilities.hpp"
#include "objvoice/clock.hpp"
#include "objvoice/dialogue/audio.hpp"

namespace objvoice::dialogue {

inline constexpr std::size_t kDefaultParallelism = 2;

class PlaybackSink {
 public:
  virtual ~PlaybackSink() = default;
  // Called from a single thread, in segment order.
  virtual void play(const AudioClip& clip) = 0;
};

struct SynthesisResult {
  std::vector<AudioClip> clips;  // every successful segment, by segment_index
  std::size_t played = 0;        // clips handed to the sink (a prefix of the segments)
  std::optional<std::size_t> failed_segment;  // first segment that failed
  std::string failure;

  bool ok() const { return !failed_segment.has_value(); }
};

// Synthesizes up to `parallelism` segments at a time and plays them strictly
// in order as each becomes ready. A failed segment stops playback at the gap;
// the remaining segments are still synthesized and returned unplayed.
SynthesisResult synthesize_ordered(std::span<const std::string> segments, persona::VoiceId voice,
                                   persona::Language language, backends::Synthesizer& synth,
                                   std::size_t parallelism, const Clock& clock,
                                   PlaybackSink* sink = nullptr);

// Throws InvalidArgument for empty audio, BackendFailure when the backend
// throws and EmptyTranscript when nothing but whitespace comes back.
std::string transcribe(const PcmAudio& audio, backends::Transcriber& transcriber,
                       persona::Language language);

// Real-time factor: synthesis time over produced audio duration.
double rtf(const AudioClip& clip);

struct CycleMetrics {
  double input_duration_ms = 0.0;
  std::vector<double> synth_ms;  // per segment
  std::vector<double> rtf;       // per segment
};

struct MetricsSummary {
  std::size_t rounds = 0;
  double input_total_s = 0.0;
  double input_mean_s = 0.0;
  double input_sd_s = 0.0;
  std::size_t segments = 0;
  double synth_mean_s = 0.0;
  double synth_sd_s = 0.0;
  double rtf_mean = 0.0;
  double rtf_sd = 0.0;
};

MetricsSummary summarize(std::span<const CycleMetrics> cycles);
// "key=value" lines.
std::string format_metrics(const MetricsSummary& summary);

}  // namespace objvoice::dialogue
