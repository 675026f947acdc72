#include "objvoice/vision/pipeline.hpp"

#include <algorithm>
#include <memory>

#include "objvoice/error.hpp"

namespace objvoice::vision {

std::vector<protocol::ScopeFrame> collect_frames(protocol::FrameSource& source, std::size_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "frame count must be at least 1");
  std::vector<protocol::ScopeFrame> frames;
  frames.reserve(n);
  while (frames.size() < n) {
    protocol::ScopeFrame frame;
    try {
      frame = source.next_frame();
    } catch (const Error& e) {
      if (e.code() == Errc::MalformedFrame) throw;
      throw Error(Errc::SourceLost, "after " + std::to_string(frames.size()) + " of " +
                                        std::to_string(n) + " frames: " + e.what());
    }
    protocol::validate_frame(frame);
    if (!frames.empty() && frame.sequence <= frames.back().sequence) {
      throw Error(Errc::MalformedFrame, "frame sequence did not increase");
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<AnnotatedSample> annotate_frames(std::span<const protocol::ScopeFrame> frames,
                                             backends::Segmenter& segmenter,
                                             std::uint32_t class_id) {
  std::vector<AnnotatedSample> samples;
  samples.reserve(frames.size());
  for (const auto& frame : frames) {
    std::vector<MaskCandidate> candidates;
    try {
      candidates = segmenter.segment(frame);
    } catch (const std::exception& e) {
      throw Error(Errc::BackendFailure, "segmenter failed on frame " +
                                            std::to_string(frame.sequence) + ": " + e.what());
    }
    const MaskCandidate& primary = select_primary_mask(candidates);
    if (primary.mask.width != frame.width || primary.mask.height != frame.height) {
      throw Error(Errc::BackendFailure, "segmenter mask size differs from frame");
    }
    samples.push_back(AnnotatedSample{std::make_shared<const protocol::ScopeFrame>(frame),
                                      class_id, mask_to_bbox(primary.mask)});
  }
  return samples;
}

ModelHandle register_class(const Dataset& dataset, backends::Trainer& trainer,
                           const ModelHandle* prev, const backends::TrainOptions& options) {
  if (dataset.class_names.empty()) throw Error(Errc::InvalidArgument, "dataset has no classes");
  if (prev != nullptr) {
    const auto& old = prev->class_names;
    if (old.size() > dataset.class_names.size() ||
        !std::equal(old.begin(), old.end(), dataset.class_names.begin())) {
      throw Error(Errc::ClassListMismatch,
                  "previous model classes are not a prefix of the dataset classes");
    }
  }
  ModelHandle model;
  try {
    model = trainer.train(dataset, options, prev);
  } catch (const std::exception& e) {
    throw Error(Errc::TrainerFailure, e.what());
  }
  if (model.class_names != dataset.class_names) {
    throw Error(Errc::TrainerFailure, "trained model does not cover the dataset classes");
  }
  return model;
}

std::vector<Detection> detect(const protocol::ScopeFrame& frame, backends::Detector& detector,
                              const ModelHandle& model, const Clock& clock, double threshold) {
  if (model.empty()) throw Error(Errc::InvalidArgument, "model has no classes");
  std::vector<Detection> raw;
  const Stopwatch watch(clock);
  try {
    raw = detector.detect(frame, model);
  } catch (const std::exception& e) {
    throw Error(Errc::BackendFailure, std::string("detector: ") + e.what());
  }
  const double latency = watch.elapsed_ms();

  std::vector<Detection> out;
  for (auto& d : raw) {
    d.confidence = std::clamp(d.confidence, 0.0, 1.0);
    if (d.confidence >= threshold) {
      d.latency_ms = latency;
      out.push_back(d);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.class_id < b.class_id;
  });
  return out;
}

}  // namespace objvoice::vision
