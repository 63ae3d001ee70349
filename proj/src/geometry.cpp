#include "laylab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace laylab {

bool bbox_valid(const BBox& b, double eps) {
  if (!(b.x >= 0.0 && b.x <= 1.0)) return false;
  if (!(b.y >= 0.0 && b.y <= 1.0)) return false;
  if (!(b.w > 0.0 && b.h > 0.0)) return false;
  if (!(b.x + b.w <= 1.0 + eps)) return false;
  if (!(b.y + b.h <= 1.0 + eps)) return false;
  return true;
}

BBox make_bbox(double x, double y, double w, double h) {
  const BBox b{x, y, w, h};
  if (!bbox_valid(b)) {
    throw std::invalid_argument("invalid bbox (" + std::to_string(x) + ", " +
                                std::to_string(y) + ", " + std::to_string(w) +
                                ", " + std::to_string(h) + ")");
  }
  return b;
}

double area(const BBox& b) { return b.w * b.h; }

namespace {

// 1-D overlap, exact when one extent contains the other: naive
// min(hi) - max(lo) arithmetic loses an ulp on (x + w) - x, which matters to
// strict-containment checks downstream.
double overlap_1d(double a0, double aw, double b0, double bw) {
  const double a1 = a0 + aw, b1 = b0 + bw;
  if (a0 >= b0 && a1 <= b1) return aw;
  if (b0 >= a0 && b1 <= a1) return bw;
  const double w = std::min(a1, b1) - std::max(a0, b0);
  return w > 0.0 ? w : 0.0;
}

}  // namespace

double intersect_area(const BBox& a, const BBox& b) {
  return overlap_1d(a.x, a.w, b.x, b.w) * overlap_1d(a.y, a.h, b.y, b.h);
}

double iou(const BBox& a, const BBox& b) {
  const double inter = intersect_area(a, b);
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Point center(const BBox& b) { return {b.x + b.w / 2.0, b.y + b.h / 2.0}; }

namespace {

// Marks the grid cells whose center lies inside any of the boxes.
void mark_cells(std::span<const BBox> boxes, int res, std::vector<uint8_t>* mask) {
  for (const BBox& b : boxes) {
    // Cell i has center (i + 0.5) / res; it is inside [lo, hi] iff
    // i in [lo*res - 0.5, hi*res - 0.5].
    const auto lo_cell = [res](double lo) {
      const int i = static_cast<int>(std::ceil(lo * res - 0.5));
      return std::clamp(i, 0, res - 1);
    };
    const auto hi_cell = [res](double hi) {
      const int i = static_cast<int>(std::floor(hi * res - 0.5));
      return std::clamp(i, 0, res - 1);
    };
    const int x0 = lo_cell(b.x), x1 = hi_cell(b.x + b.w);
    const int y0 = lo_cell(b.y), y1 = hi_cell(b.y + b.h);
    if (x1 < x0 || y1 < y0) continue;
    for (int y = y0; y <= y1; ++y) {
      uint8_t* row = mask->data() + static_cast<size_t>(y) * res;
      std::fill(row + x0, row + x1 + 1, uint8_t{1});
    }
  }
}

}  // namespace

double rasterized_union_overlap(std::span<const BBox> boxes_a,
                                std::span<const BBox> boxes_b, int resolution) {
  if (resolution < 16) {
    throw std::invalid_argument("rasterized_union_overlap: resolution < 16");
  }
  if (boxes_b.empty()) return 0.0;

  const size_t cells = static_cast<size_t>(resolution) * resolution;
  std::vector<uint8_t> mask_a(cells, 0), mask_b(cells, 0);
  mark_cells(boxes_a, resolution, &mask_a);
  mark_cells(boxes_b, resolution, &mask_b);

  size_t in_b = 0, in_both = 0;
  for (size_t i = 0; i < cells; ++i) {
    if (mask_b[i]) {
      ++in_b;
      if (mask_a[i]) ++in_both;
    }
  }
  if (in_b == 0) return 0.0;
  return static_cast<double>(in_both) / static_cast<double>(in_b);
}

}  // namespace laylab
