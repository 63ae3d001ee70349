#ifndef LAYLAB_GEOMETRY_HPP_
#define LAYLAB_GEOMETRY_HPP_

#include <span>
#include <vector>

namespace laylab {

// Boxes may exceed the unit canvas by at most this much.
inline constexpr double kBoxEpsilon = 1e-6;

// Axis-aligned box in normalized canvas coordinates. (x, y) is the top-left
// corner; a valid box has positive size and lies inside the unit canvas
// (up to kBoxEpsilon).
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const BBox&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

bool bbox_valid(const BBox& b, double eps = kBoxEpsilon);

// Checked constructor for ingestion paths; throws std::invalid_argument on
// boxes violating the invariants.
BBox make_bbox(double x, double y, double w, double h);

double area(const BBox& b);
double intersect_area(const BBox& a, const BBox& b);

// Intersection over union; 1 for identical boxes, 0 for disjoint ones.
double iou(const BBox& a, const BBox& b);

Point center(const BBox& b);

// Area(union(a) ∩ union(b)) / Area(union(b)), approximated by sampling cell
// centers of a resolution x resolution grid over the unit canvas. Returns 0
// when boxes_b is empty. resolution must be >= 16.
double rasterized_union_overlap(std::span<const BBox> boxes_a,
                                std::span<const BBox> boxes_b,
                                int resolution = 512);

}  // namespace laylab

#endif  // LAYLAB_GEOMETRY_HPP_
