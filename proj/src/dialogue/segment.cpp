#include "objvoice/dialogue/segment.hpp"

namespace objvoice::dialogue {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

SegmentedResponse segment_response(std::string_view text, std::string_view marker) {
  SegmentedResponse out;
  out.marker = std::string(marker);
  auto push = [&](std::string_view piece) {
    piece = trim(piece);
    if (!piece.empty()) out.segments.emplace_back(piece);
  };
  if (marker.empty()) {
    push(text);
    return out;
  }
  std::size_t start = 0;
  for (std::size_t pos = text.find(marker); pos != std::string_view::npos;
       pos = text.find(marker, start)) {
    push(text.substr(start, pos - start));
    start = pos + marker.size();
  }
  push(text.substr(start));
  return out;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

}  // namespace objvoice::dialogue
