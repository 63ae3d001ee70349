#ifndef LAYLAB_TESTS_FIXTURES_HPP_
#define LAYLAB_TESTS_FIXTURES_HPP_

#include <string>
#include <utility>
#include <vector>

#include "laylab/critique.hpp"
#include "laylab/layout_model.hpp"

namespace laylab::testing {

inline Layout layout_of(std::vector<std::pair<ElementCategory, BBox>> items) {
  Layout layout;
  int id = 0;
  for (auto& [cat, box] : items) {
    layout.elements.push_back(LayoutElement{id++, cat, box});
  }
  return layout;
}

inline CanvasSpec spec_for(const Layout& layout, std::vector<BBox> saliency = {},
                           int width = 900, int height = 1200) {
  CanvasSpec spec;
  spec.canvas_width = width;
  spec.canvas_height = height;
  for (const LayoutElement& e : layout.elements) {
    spec.elements.push_back(ElementSpec{e.id, e.category, std::nullopt});
  }
  spec.saliency = std::move(saliency);
  return spec;
}

inline DualLevelOutput wrap_valid(const Layout& layout) {
  DualLevelOutput out;
  out.layout = layout;
  out.parse_status = ParseStatus::kValid;
  return out;
}

// Paired good/bad layouts, one pair per quality sub-score. The targeted
// sub-score must prefer the good side by a clear margin.
struct ScorePair {
  const char* name;
  Layout good;
  Layout bad;
  double (*score)(const Layout&);
};

inline std::vector<ScorePair> score_pairs() {
  using C = ElementCategory;
  std::vector<ScorePair> pairs;

  // collision: disjoint texts vs heavily overlapping texts
  pairs.push_back({"collision",
                   layout_of({{C::kText, {0.1, 0.1, 0.3, 0.15}},
                              {C::kText, {0.6, 0.6, 0.3, 0.15}}}),
                   layout_of({{C::kText, {0.3, 0.3, 0.3, 0.2}},
                              {C::kText, {0.32, 0.32, 0.3, 0.2}}}),
                   [](const Layout& l) { return inverse_collision(l, {}); }});

  // alignment: centered column vs corner scatter
  pairs.push_back({"alignment",
                   layout_of({{C::kText, {0.35, 0.3, 0.3, 0.1}},
                              {C::kText, {0.35, 0.45, 0.3, 0.1}},
                              {C::kLogo, {0.35, 0.6, 0.3, 0.1}}}),
                   layout_of({{C::kText, {0.0, 0.0, 0.2, 0.1}},
                              {C::kText, {0.8, 0.05, 0.2, 0.1}},
                              {C::kLogo, {0.0, 0.85, 0.2, 0.1}}}),
                   [](const Layout& l) { return alignment_score(l, 0.5); }});

  // distribution: spread across the grid vs one corner cluster
  pairs.push_back({"distribution",
                   layout_of({{C::kText, {0.05, 0.05, 0.2, 0.1}},
                              {C::kText, {0.75, 0.05, 0.2, 0.1}},
                              {C::kText, {0.4, 0.45, 0.2, 0.1}},
                              {C::kLogo, {0.05, 0.85, 0.2, 0.1}},
                              {C::kLogo, {0.75, 0.85, 0.2, 0.1}}}),
                   layout_of({{C::kText, {0.02, 0.02, 0.1, 0.05}},
                              {C::kText, {0.05, 0.08, 0.1, 0.05}},
                              {C::kText, {0.02, 0.14, 0.1, 0.05}},
                              {C::kLogo, {0.08, 0.02, 0.1, 0.05}},
                              {C::kLogo, {0.08, 0.2, 0.1, 0.05}}}),
                   distribution_score});

  // spacing: uniform vertical rhythm vs bunched rows
  pairs.push_back({"spacing",
                   layout_of({{C::kText, {0.3, 0.15, 0.4, 0.1}},
                              {C::kText, {0.3, 0.45, 0.4, 0.1}},
                              {C::kText, {0.3, 0.75, 0.4, 0.1}}}),
                   layout_of({{C::kText, {0.3, 0.05, 0.4, 0.1}},
                              {C::kText, {0.3, 0.15, 0.4, 0.1}},
                              {C::kText, {0.3, 0.75, 0.4, 0.1}}}),
                   spacing_consistency});

  // underlay: one fully backed text vs two texts on one underlay
  pairs.push_back({"underlay",
                   layout_of({{C::kUnderlay, {0.25, 0.25, 0.5, 0.3}},
                              {C::kText, {0.3, 0.3, 0.4, 0.2}}}),
                   layout_of({{C::kUnderlay, {0.25, 0.25, 0.5, 0.3}},
                              {C::kText, {0.3, 0.3, 0.2, 0.2}},
                              {C::kText, {0.55, 0.3, 0.15, 0.2}}}),
                   underlay_text_score});

  return pairs;
}

}  // namespace laylab::testing

#endif  // LAYLAB_TESTS_FIXTURES_HPP_
