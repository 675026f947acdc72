#include "objvoice/vision/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "objvoice/error.hpp"

namespace objvoice::vision {

std::size_t Mask::area() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

bool is_valid(const BBox& box, double tolerance) {
  auto in_unit = [&](double v) { return v >= -tolerance && v <= 1.0 + tolerance; };
  if (!in_unit(box.cx) || !in_unit(box.cy)) return false;
  if (!(box.w > 0.0) || !(box.h > 0.0) || box.w > 1.0 + tolerance || box.h > 1.0 + tolerance) {
    return false;
  }
  return in_unit(box.cx - box.w / 2) && in_unit(box.cx + box.w / 2) &&
         in_unit(box.cy - box.h / 2) && in_unit(box.cy + box.h / 2);
}

BBox mask_to_bbox(const Mask& mask) {
  int min_x = mask.width, min_y = mask.height, max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
    const std::uint8_t* first = std::find(row, row + mask.width, std::uint8_t{1});
    if (first == row + mask.width) continue;
    const std::uint8_t* last = std::find(std::make_reverse_iterator(row + mask.width),
                                         std::make_reverse_iterator(row), std::uint8_t{1})
                                   .base() -
                               1;
    min_x = std::min(min_x, static_cast<int>(first - row));
    max_x = std::max(max_x, static_cast<int>(last - row));
    min_y = std::min(min_y, y);
    max_y = y;
  }
  if (max_x < 0) throw Error(Errc::EmptyMask, "mask has no set bits");

  const double w = static_cast<double>(max_x - min_x + 1) / mask.width;
  const double h = static_cast<double>(max_y - min_y + 1) / mask.height;
  return BBox{(min_x + (max_x - min_x + 1) / 2.0) / mask.width,
              (min_y + (max_y - min_y + 1) / 2.0) / mask.height, w, h};
}

PixelRect to_pixels(const BBox& box, int width, int height) {
  auto clampi = [](long v, int hi) { return static_cast<int>(std::clamp<long>(v, 0, hi)); };
  PixelRect r;
  r.x0 = clampi(std::lround((box.cx - box.w / 2) * width), width);
  r.x1 = clampi(std::lround((box.cx + box.w / 2) * width), width);
  r.y0 = clampi(std::lround((box.cy - box.h / 2) * height), height);
  r.y1 = clampi(std::lround((box.cy + box.h / 2) * height), height);
  return r;
}

namespace {
struct Centroid {
  double x = 0, y = 0;
};

Centroid centroid(const Mask& m) {
  double sx = 0, sy = 0, n = 0;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (m.at(x, y)) {
        sx += x;
        sy += y;
        n += 1;
      }
    }
  }
  return n > 0 ? Centroid{sx / n, sy / n} : Centroid{};
}
}  // namespace

const MaskCandidate& select_primary_mask(std::span<const MaskCandidate> candidates) {
  const MaskCandidate* best = nullptr;
  std::size_t best_area = 0;
  Centroid best_c;
  for (const auto& c : candidates) {
    const std::size_t area = c.mask.area();
    if (area == 0) continue;
    const Centroid cc = centroid(c.mask);
    bool better = false;
    if (best == nullptr) {
      better = true;
    } else if (c.saliency != best->saliency) {
      better = c.saliency > best->saliency;
    } else if (area != best_area) {
      better = area > best_area;
    } else if (cc.y != best_c.y) {
      better = cc.y < best_c.y;
    } else {
      better = cc.x < best_c.x;
    }
    if (better) {
      best = &c;
      best_area = area;
      best_c = cc;
    }
  }
  if (best == nullptr) throw Error(Errc::EmptyMask, "segmenter found no object");
  return *best;
}

}  // namespace objvoice::vision
