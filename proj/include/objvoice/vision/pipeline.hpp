#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "objvoice/backends/capabilities.hpp"
#include "objvoice/clock.hpp"
#include "objvoice/protocol/frame.hpp"
#include "objvoice/vision/dataset.hpp"
#include "objvoice/vision/model.hpp"

namespace objvoice::vision {

inline constexpr std::size_t kAcquaintanceFrames = 100;

// Pulls exactly n frames in arrival order. If the source fails before n
// frames arrive the partial buffer is dropped and Error(SourceLost) thrown.
std::vector<protocol::ScopeFrame> collect_frames(protocol::FrameSource& source, std::size_t n);

// Segments every frame, keeps the primary mask and turns it into a sample
// labelled `class_id`. Segmenter failures surface as Error(BackendFailure);
// a frame without any object as Error(EmptyMask).
std::vector<AnnotatedSample> annotate_frames(std::span<const protocol::ScopeFrame> frames,
                                             backends::Segmenter& segmenter,
                                             std::uint32_t class_id);

// Trains a model over `dataset`, starting from `prev` when given. prev's
// class list must be a prefix of dataset.class_names (ClassListMismatch);
// trainer errors surface as TrainerFailure.
ModelHandle register_class(const Dataset& dataset, backends::Trainer& trainer,
                           const ModelHandle* prev,
                           const backends::TrainOptions& options = {});

// Runs the detector and keeps detections at or above `threshold`, sorted by
// descending confidence. Each detection carries the backend call latency.
std::vector<Detection> detect(const protocol::ScopeFrame& frame, backends::Detector& detector,
                              const ModelHandle& model, const Clock& clock,
                              double threshold = kDefaultConfidenceThreshold);

}  // namespace objvoice::vision
