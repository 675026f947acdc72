#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "objvoice/backends/capabilities.hpp"
#include "objvoice/clock.hpp"
#include "objvoice/vision/model.hpp"

namespace objvoice::vision {

// Runs detection off the session loop with at most one frame in flight.
// A frame submitted while another is pending replaces it (latest frame wins).
class DetectionWorker {
 public:
  // `error` is null on success.
  using Callback = std::function<void(const protocol::ScopeFrame& frame,
                                      std::vector<Detection> detections, std::exception_ptr error)>;

  DetectionWorker(backends::Detector& detector, const Clock& clock, double threshold,
                  Callback on_result);
  ~DetectionWorker();
  DetectionWorker(const DetectionWorker&) = delete;
  DetectionWorker& operator=(const DetectionWorker&) = delete;

  void set_model(ModelHandle model);
  void submit(protocol::ScopeFrame frame);
  // Blocks until nothing is pending or in flight.
  void drain();
  void stop();

  std::size_t processed() const;
  std::size_t dropped() const;

 private:
  void run();

  backends::Detector& detector_;
  const Clock& clock_;
  double threshold_;
  Callback on_result_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::optional<protocol::ScopeFrame> pending_;
  std::optional<ModelHandle> model_;
  bool busy_ = false;
  bool stopping_ = false;
  std::size_t processed_ = 0;
  std::size_t dropped_ = 0;
  std::thread thread_;
};

}  // namespace objvoice::vision
