#include "objvoice/vision/evaluation.hpp"

#include <cstdio>
#include <vector>

#include "objvoice/error.hpp"
#include "objvoice/util/stats.hpp"
#include "objvoice/vision/pipeline.hpp"

namespace objvoice::vision {

DetectionReport evaluate_stream(protocol::FrameSource& source, backends::Detector& detector,
                                const ModelHandle& model, std::uint32_t truth,
                                const Clock& clock, std::size_t n, double threshold) {
  if (n == 0) throw Error(Errc::TooFewSamples, "evaluation needs at least one frame");
  DetectionReport report;
  report.class_id = truth;
  report.threshold = threshold;

  std::vector<double> latencies;
  std::vector<double> confidences;
  latencies.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    protocol::ScopeFrame frame;
    try {
      frame = source.next_frame();
    } catch (const Error& e) {
      throw Error(Errc::SourceLost, "after " + std::to_string(i) + " frames: " + e.what());
    }
    const Stopwatch watch(clock);
    const auto detections = detect(frame, detector, model, clock, threshold);
    latencies.push_back(watch.elapsed_ms());

    if (!detections.empty() && detections.front().class_id == truth) ++report.frames_correct;
    for (const auto& d : detections) {
      if (d.class_id == truth && d.confidence > threshold) {
        confidences.push_back(d.confidence);
        break;
      }
    }
  }
  report.frames_evaluated = n;
  report.accuracy = static_cast<double>(report.frames_correct) / static_cast<double>(n);
  report.latency_mean_ms = util::mean(latencies);
  report.latency_sd_ms = util::sample_sd(latencies);
  report.confident_detections = confidences.size();
  report.confidence_mean = util::mean(confidences);
  report.confidence_sd = util::sample_sd(confidences);
  return report;
}

std::string format_report(const DetectionReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "class_id=%u\n"
                "frames_evaluated=%zu\n"
                "frames_correct=%zu\n"
                "accuracy=%.6f\n"
                "average_time_ms=%.4f\n"
                "sd_time_ms=%.4f\n"
                "confidence_threshold=%.2f\n"
                "confident_detections=%zu\n"
                "average_confidence=%.4f\n"
                "sd_confidence=%.4f\n",
                r.class_id, r.frames_evaluated, r.frames_correct, r.accuracy, r.latency_mean_ms,
                r.latency_sd_ms, r.threshold, r.confident_detections, r.confidence_mean,
                r.confidence_sd);
  return buf;
}

}  // namespace objvoice::vision
