#include "objvoice/dialogue/recorder.hpp"

#include <algorithm>

#include "objvoice/error.hpp"

namespace objvoice::dialogue {

void TextMicrophone::start(Micros at) {
  if (started_) throw Error(Errc::InvalidState, "microphone already recording");
  on_start(at);
  started_ = at;
}

PcmAudio TextMicrophone::stop(Micros at) {
  if (!started_) throw Error(Errc::InvalidState, "microphone not recording");
  Micros length = std::max(at - *started_, Micros(0));
  if (!utterance_.empty()) length = std::max(length, Micros(10'000));
  started_.reset();
  PcmAudio audio;
  audio.samples.assign(static_cast<std::size_t>(length.count() * kSampleRate / 1'000'000), 0);
  audio.annotation = utterance_;
  return audio;
}

}  // namespace objvoice::dialogue
