#include "objvoice/vision/detection_worker.hpp"

#include "objvoice/vision/pipeline.hpp"

namespace objvoice::vision {

DetectionWorker::DetectionWorker(backends::Detector& detector, const Clock& clock,
                                 double threshold, Callback on_result)
    : detector_(detector),
      clock_(clock),
      threshold_(threshold),
      on_result_(std::move(on_result)),
      thread_([this] { run(); }) {}

DetectionWorker::~DetectionWorker() { stop(); }

void DetectionWorker::set_model(ModelHandle model) {
  std::lock_guard lock(mu_);
  model_ = std::move(model);
}

void DetectionWorker::submit(protocol::ScopeFrame frame) {
  std::lock_guard lock(mu_);
  if (pending_) ++dropped_;
  pending_ = std::move(frame);
  cv_.notify_all();
}

void DetectionWorker::drain() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return (!pending_ && !busy_) || stopping_; });
}

void DetectionWorker::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
    cv_.notify_all();
  }
  if (thread_.joinable()) thread_.join();
}

std::size_t DetectionWorker::processed() const {
  std::lock_guard lock(mu_);
  return processed_;
}

std::size_t DetectionWorker::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

void DetectionWorker::run() {
  for (;;) {
    protocol::ScopeFrame frame;
    std::optional<ModelHandle> model;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return pending_.has_value() || stopping_; });
      if (stopping_) return;
      frame = std::move(*pending_);
      pending_.reset();
      model = model_;
      busy_ = true;
    }
    std::vector<Detection> detections;
    std::exception_ptr error;
    if (model && !model->empty()) {
      try {
        detections = detect(frame, detector_, *model, clock_, threshold_);
      } catch (...) {
        error = std::current_exception();
      }
    }
    if (on_result_) on_result_(frame, std::move(detections), error);
    {
      std::lock_guard lock(mu_);
      busy_ = false;
      ++processed_;
      cv_.notify_all();
    }
  }
}

}  // namespace objvoice::vision
