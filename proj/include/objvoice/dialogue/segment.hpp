#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace objvoice::dialogue {

struct SegmentedResponse {
  std::vector<std::string> segments;
  std::string marker;
};

// Splits on every occurrence of `marker`, trims each fragment and drops the
// empty ones. Text without the marker comes back as a single segment; text
// that is only markers and whitespace yields no segments.
SegmentedResponse segment_response(std::string_view text, std::string_view marker);

// Collapses runs of ASCII whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

}  // namespace objvoice::dialogue
