#ifndef LAYLAB_CRITIQUE_HPP_
#define LAYLAB_CRITIQUE_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "laylab/geometry.hpp"
#include "laylab/layout_model.hpp"

namespace laylab {

// Weights of the five layout quality sub-scores plus the alignment mixing
// factor. The sub-weights must be non-negative and sum to 1.
struct QualityWeights {
  double icr = 0.2;
  double align = 0.2;
  double dist = 0.2;
  double spacing = 0.2;
  double underlay = 0.2;
  double alpha = 0.5;
};

// Throws std::invalid_argument when the weights violate their invariants.
void validate_weights(const QualityWeights& qw);

// Mixing weights of the hybrid reward: format, quality, reference IoU.
struct RewardWeights {
  double format_weight = 0.0;
  double quality_weight = 0.0;
  double iou_weight = 0.0;

  static RewardWeights format_focused() { return {0.5, 0.4, 0.1}; }
  static RewardWeights quality_focused() { return {0.1, 0.8, 0.1}; }
  static RewardWeights iou_focused() { return {0.1, 0.1, 0.8}; }
  static RewardWeights balanced_hybrid() { return {0.1, 0.45, 0.45}; }

  // Preset by name; nullopt for unknown names.
  static std::optional<RewardWeights> preset(std::string_view name);
};

inline constexpr const char* kPresetNames[] = {"format_focused", "quality_focused",
                                               "iou_focused", "balanced_hybrid"};

// All sub-scores of one candidate. iou is absent when no reference layout
// was supplied.
struct RewardBreakdown {
  double format = 0.0;
  double icr = 0.0;
  double align = 0.0;
  double dist = 0.0;
  double spacing = 0.0;
  double underlay = 0.0;
  double quality = 0.0;
  std::optional<double> iou;
  double total = 0.0;
};

std::string to_json(const RewardBreakdown& b);

// Which unordered category pairs may overlap on purpose. Saliency regions
// participate as a pseudo-category; by default only (underlay, text) overlap
// is intended.
class CompatibilityMatrix {
 public:
  static constexpr int kSaliency = kCategoryCount;  // pseudo-category index

  CompatibilityMatrix();

  bool intended_overlap(ElementCategory a, ElementCategory b) const;
  bool intended_overlap_with_saliency(ElementCategory a) const;
  void set(int a, int b, bool intended);

 private:
  bool flags_[kCategoryCount + 1][kCategoryCount + 1];
};

// Hierarchical format compliance reward: {0.1, 0.2, 0.5, 1.0}.
double format_reward(ParseStatus status);
double format_reward(const DualLevelOutput& out);

// Mean of (1 - IoU) over incompatible pairs: element pairs whose categories
// are not intended to overlap, plus (element, saliency) pairs for non-underlay
// elements. 1.0 when there are no such pairs.
double inverse_collision(const Layout& layout, std::span<const BBox> saliency,
                         const CompatibilityMatrix& compat = CompatibilityMatrix());

// alpha-blend of canvas centering and center-variance regularity, clamped to
// [0, 1]. Canvas is the unit square, so the canvas center is (0.5, 0.5) and
// the diagonal is sqrt(2).
double alignment_score(const Layout& layout, double alpha);

// Mean of spread variance (normalized by the squared diagonal) and 3x3 grid
// coverage, clamped to [0, 1].
double distribution_score(const Layout& layout);

// 1 - Var(spacings)/mean(spacing)^2 over vertically sorted element centers,
// clamped to [0, 1]; 1.0 for fewer than two spacings or zero mean spacing.
double spacing_consistency(const Layout& layout);

// Underlay-text pairing: an underlay overlapped by exactly one text scores
// the contained fraction of that text; zero or multiple texts score 0.
// Mean over underlays; 1.0 when there are none.
double underlay_text_score(const Layout& layout);

// Greedy per-category IoU matching against a reference layout; mean IoU over
// reference elements. Throws std::invalid_argument on per-category count
// mismatch.
double iou_reward(const Layout& layout, const Layout& reference);

// Weighted sum of the five sub-scores; sub-scores are recorded into
// *breakdown when provided.
double quality_reward(const Layout& layout, std::span<const BBox> saliency,
                      const QualityWeights& qw,
                      const CompatibilityMatrix& compat = CompatibilityMatrix(),
                      RewardBreakdown* breakdown = nullptr);

// The hybrid reward. Non-VALID outputs earn only format credit; when no
// reference exists the IoU mass is folded into the quality weight.
RewardBreakdown hybrid_reward(const DualLevelOutput& out, const CanvasSpec& spec,
                              const Layout* reference, const RewardWeights& rw,
                              const QualityWeights& qw = QualityWeights(),
                              const CompatibilityMatrix& compat = CompatibilityMatrix());

}  // namespace laylab

#endif  // LAYLAB_CRITIQUE_HPP_
