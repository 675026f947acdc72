#include "objvoice/dialogue/speech.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <mutex>
#include <thread>

#include "objvoice/dialogue/segment.hpp"
#include "objvoice/error.hpp"
#include "objvoice/util/stats.hpp"

namespace objvoice::dialogue {

namespace {

struct Slot {
  bool done = false;
  bool failed = false;
  AudioClip clip;
  std::string error;
};

}  // namespace

SynthesisResult synthesize_ordered(std::span<const std::string> segments, persona::VoiceId voice,
                                   persona::Language language, backends::Synthesizer& synth,
                                   std::size_t parallelism, const Clock& clock,
                                   PlaybackSink* sink) {
  if (parallelism < 1) throw Error(Errc::InvalidArgument, "parallelism must be at least 1");
  SynthesisResult result;
  if (segments.empty()) return result;

  std::vector<Slot> slots(segments.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < segments.size(); i = next.fetch_add(1)) {
      Slot slot;
      slot.clip.segment_index = i;
      try {
        const Stopwatch watch(clock);
        slot.clip.samples = synth.synthesize(segments[i], voice, language);
        slot.clip.synth_ms = watch.elapsed_ms();
        if (slot.clip.samples.empty()) {
          slot.failed = true;
          slot.error = "synthesizer returned no audio";
        }
      } catch (const std::exception& e) {
        slot.failed = true;
        slot.error = e.what();
      }
      slot.done = true;
      std::lock_guard lock(mu);
      slots[i] = std::move(slot);
      ready.notify_all();
    }
  };

  const std::size_t workers = std::min(parallelism, segments.size());
  std::vector<std::thread> pool;
  if (workers == 1) {
    worker();  // nothing to overlap with; every slot is ready below
  } else {
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  // Ordered reassembly: play slot i only once 0..i-1 have played.
  bool playing = true;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[i].done; });
    const Slot& slot = slots[i];
    if (slot.failed) {
      if (!result.failed_segment) {
        result.failed_segment = i;
        result.failure = slot.error;
      }
      playing = false;
      continue;
    }
    if (playing) {
      lock.unlock();
      if (sink != nullptr) sink->play(slot.clip);
      ++result.played;
    }
  }
  for (auto& t : pool) t.join();

  for (auto& slot : slots) {
    if (!slot.failed) result.clips.push_back(std::move(slot.clip));
  }
  return result;
}

std::string transcribe(const PcmAudio& audio, backends::Transcriber& transcriber,
                       persona::Language language) {
  if (audio.samples.empty()) throw Error(Errc::InvalidArgument, "recorded audio is empty");
  std::string text;
  try {
    text = transcriber.transcribe(audio, language);
  } catch (const std::exception& e) {
    throw Error(Errc::BackendFailure, std::string("transcriber: ") + e.what());
  }
  if (normalize_whitespace(text).empty()) throw Error(Errc::EmptyTranscript, "nothing was heard");
  return text;
}

double rtf(const AudioClip& clip) {
  if (clip.samples.empty()) throw Error(Errc::InvalidArgument, "clip has no samples");
  return clip.synth_ms / clip.duration_ms();
}

MetricsSummary summarize(std::span<const CycleMetrics> cycles) {
  MetricsSummary s;
  std::vector<double> inputs, synth, rtfs;
  for (const auto& c : cycles) {
    inputs.push_back(c.input_duration_ms / 1000.0);
    for (double v : c.synth_ms) synth.push_back(v / 1000.0);
    rtfs.insert(rtfs.end(), c.rtf.begin(), c.rtf.end());
  }
  s.rounds = cycles.size();
  for (double v : inputs) s.input_total_s += v;
  s.input_mean_s = util::mean(inputs);
  s.input_sd_s = util::sample_sd(inputs);
  s.segments = synth.size();
  s.synth_mean_s = util::mean(synth);
  s.synth_sd_s = util::sample_sd(synth);
  s.rtf_mean = util::mean(rtfs);
  s.rtf_sd = util::sample_sd(rtfs);
  return s;
}

std::string format_metrics(const MetricsSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "rounds=%zu\n"
                "input_duration_total_s=%.4f\n"
                "input_duration_mean_s=%.4f\n"
                "input_duration_sd_s=%.4f\n"
                "segments=%zu\n"
                "synth_time_mean_s=%.4f\n"
                "synth_time_sd_s=%.4f\n"
                "rtf_mean=%.6f\n"
                "rtf_sd=%.6f\n",
                s.rounds, s.input_total_s, s.input_mean_s, s.input_sd_s, s.segments,
                s.synth_mean_s, s.synth_sd_s, s.rtf_mean, s.rtf_sd);
  return buf;
}

}  // namespace objvoice::dialogue
