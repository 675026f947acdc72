#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "objvoice/vision/geometry.hpp"

namespace objvoice::vision {

// A trained detector as produced by a trainer backend.
struct ModelHandle {
  std::string id;
  std::vector<std::string> class_names;
  std::filesystem::path location;  // backend-specific artifacts
  int epochs_run = 0;
  int best_epoch = 0;

  bool empty() const { return class_names.empty(); }
};

struct Detection {
  std::uint32_t class_id = 0;
  BBox bbox;
  double confidence = 0.0;
  double latency_ms = 0.0;
};

inline constexpr double kDefaultConfidenceThreshold = 0.75;

}  // namespace objvoice::vision
