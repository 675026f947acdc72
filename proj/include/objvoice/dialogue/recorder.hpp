#pragma once

#include <optional>
#include <string>

#include "objvoice/clock.hpp"
#include "objvoice/dialogue/audio.hpp"

namespace objvoice::dialogue {

// Microphone behind the push-to-talk button.
class Recorder {
 public:
  virtual ~Recorder() = default;
  // Throws Error(InvalidState) if already recording.
  virtual void start(Micros at) = 0;
  // Throws Error(InvalidState) if not recording.
  virtual PcmAudio stop(Micros at) = 0;
  virtual bool recording() const = 0;
};

// Silent recording whose embedded text is whatever was set last; the
// stand-in for speech when input is typed or scripted. A recording with
// text is never shorter than one 10 ms frame.
class TextMicrophone : public Recorder {
 public:
  void set_utterance(std::string text) { utterance_ = std::move(text); }

  void start(Micros at) override;
  PcmAudio stop(Micros at) override;
  bool recording() const override { return started_.has_value(); }

 protected:
  // Hook for subclasses choosing the utterance at start time.
  virtual void on_start(Micros) {}

 private:
  std::string utterance_;
  std::optional<Micros> started_;
};

}  // namespace objvoice::dialogue
