#pragma once

#include <cstdint>
#include <string>

#include "objvoice/backends/capabilities.hpp"
#include "objvoice/clock.hpp"
#include "objvoice/protocol/frame.hpp"
#include "objvoice/vision/model.hpp"

namespace objvoice::vision {

inline constexpr std::size_t kEvaluationFrames = 200;

// Continuous-detection statistics over a run of consecutive frames.
struct DetectionReport {
  std::uint32_t class_id = 0;
  std::size_t frames_evaluated = 0;
  std::size_t frames_correct = 0;
  double accuracy = 0.0;  // frames whose top detection is class_id
  double latency_mean_ms = 0.0;
  double latency_sd_ms = 0.0;
  double threshold = kDefaultConfidenceThreshold;
  std::size_t confident_detections = 0;  // truth-class detections above threshold
  double confidence_mean = 0.0;
  double confidence_sd = 0.0;
};

// Pulls n frames from the source and detects on each. Throws TooFewSamples
// for n == 0 and SourceLost when the source runs dry.
DetectionReport evaluate_stream(protocol::FrameSource& source, backends::Detector& detector,
                                const ModelHandle& model, std::uint32_t truth,
                                const Clock& clock, std::size_t n = kEvaluationFrames,
                                double threshold = kDefaultConfidenceThreshold);

// Flat "key=value" lines, one per report field.
std::string format_report(const DetectionReport& report);

}  // namespace objvoice::vision
