#ifndef LAYLAB_RENDER_HPP_
#define LAYLAB_RENDER_HPP_

#include <array>
#include <span>
#include <string>

#include "laylab/geometry.hpp"
#include "laylab/layout_model.hpp"

namespace laylab {

// Rendering defaults are stable: golden files depend on them.
struct RenderStyle {
  int width = 480;
  int height = 640;
  double stroke_width = 2.0;
  // Indexed by ElementCategory: text, logo, underlay, embellishment.
  std::array<std::string, kCategoryCount> fill = {"#1f77b4", "#2ca02c", "#ff7f0e",
                                                  "#9467bd"};
  std::array<double, kCategoryCount> opacity = {0.55, 0.55, 0.35, 0.55};
  std::string saliency_color = "#808080";
};

// Deterministic SVG: one labeled rect per element (underlays first, then the
// rest, each group in id order) and one hatched rect per saliency box.
std::string render_svg(const Layout& layout, std::span<const BBox> saliency,
                       const RenderStyle& style = RenderStyle());

}  // namespace laylab

#endif  // LAYLAB_RENDER_HPP_
