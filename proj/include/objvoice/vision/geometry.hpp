#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace objvoice::vision {

// Binary object mask with the dimensions of its source frame.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v = true) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t area() const;
  bool empty() const { return area() == 0; }
};

// Normalized center-format box.
struct BBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 1.0;
  double h = 1.0;

  friend bool operator==(const BBox&, const BBox&) = default;
};

// True when the box satisfies 0<=cx,cy<=1, 0<w,h<=1 and lies within the unit
// square (up to `tolerance` of floating-point slack).
bool is_valid(const BBox& box, double tolerance = 1e-9);

// Minimal axis-aligned box around every set bit, in normalized
// center-format. Throws Error(EmptyMask).
BBox mask_to_bbox(const Mask& mask);

// Pixel rectangle [x0, x1) x [y0, y1) covered by a normalized box on a
// width x height image, rounded to the nearest pixel edge.
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};
PixelRect to_pixels(const BBox& box, int width, int height);

// A segmenter proposal.
struct MaskCandidate {
  Mask mask;
  double saliency = 0.0;
};

// Picks the primary object: highest saliency, then largest area, then the
// topmost, then leftmost centroid. Throws Error(EmptyMask) if no candidate
// has any set bit.
const MaskCandidate& select_primary_mask(std::span<const MaskCandidate> candidates);

}  // namespace objvoice::vision
