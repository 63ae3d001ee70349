#include "laylab/critique.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <json.hpp>

namespace laylab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population variance.
double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

void validate_weights(const QualityWeights& qw) {
  const double sum = qw.icr + qw.align + qw.dist + qw.spacing + qw.underlay;
  if (qw.icr < 0 || qw.align < 0 || qw.dist < 0 || qw.spacing < 0 || qw.underlay < 0) {
    throw std::invalid_argument("quality weights must be non-negative");
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("quality weights must sum to 1");
  }
  if (qw.alpha < 0.0 || qw.alpha > 1.0) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
}

std::optional<RewardWeights> RewardWeights::preset(std::string_view name) {
  if (name == "format_focused") return format_focused();
  if (name == "quality_focused") return quality_focused();
  if (name == "iou_focused") return iou_focused();
  if (name == "balanced_hybrid") return balanced_hybrid();
  return std::nullopt;
}

std::string to_json(const RewardBreakdown& b) {
  nlohmann::ordered_json j;
  j["format"] = b.format;
  j["icr"] = b.icr;
  j["align"] = b.align;
  j["dist"] = b.dist;
  j["spacing"] = b.spacing;
  j["underlay"] = b.underlay;
  j["quality"] = b.quality;
  if (b.iou) {
    j["iou"] = *b.iou;
  } else {
    j["iou"] = nullptr;
  }
  j["total"] = b.total;
  return j.dump();
}

CompatibilityMatrix::CompatibilityMatrix() {
  for (auto& row : flags_) std::fill(std::begin(row), std::end(row), false);
  set(static_cast<int>(ElementCategory::kUnderlay),
      static_cast<int>(ElementCategory::kText), true);
}

void CompatibilityMatrix::set(int a, int b, bool intended) {
  flags_[a][b] = intended;
  flags_[b][a] = intended;
}

bool CompatibilityMatrix::intended_overlap(ElementCategory a, ElementCategory b) const {
  return flags_[static_cast<int>(a)][static_cast<int>(b)];
}

bool CompatibilityMatrix::intended_overlap_with_saliency(ElementCategory a) const {
  return flags_[static_cast<int>(a)][kSaliency];
}

double format_reward(ParseStatus status) {
  switch (status) {
    case ParseStatus::kMissingBlock: return 0.1;
    case ParseStatus::kBadJson: return 0.2;
    case ParseStatus::kSchemaMismatch: return 0.5;
    case ParseStatus::kValid: return 1.0;
  }
  return 0.1;
}

double format_reward(const DualLevelOutput& out) { return format_reward(out.parse_status); }

double inverse_collision(const Layout& layout, std::span<const BBox> saliency,
                         const CompatibilityMatrix& compat) {
  double sum = 0.0;
  int pairs = 0;
  const auto& els = layout.elements;
  for (size_t i = 0; i < els.size(); ++i) {
    for (size_t j = i + 1; j < els.size(); ++j) {
      if (compat.intended_overlap(els[i].category, els[j].category)) continue;
      sum += 1.0 - iou(els[i].box, els[j].box);
      ++pairs;
    }
  }
  // Saliency must stay clear of everything except underlays.
  for (const LayoutElement& e : els) {
    if (e.category == ElementCategory::kUnderlay) continue;
    if (compat.intended_overlap_with_saliency(e.category)) continue;
    for (const BBox& s : saliency) {
      sum += 1.0 - iou(e.box, s);
      ++pairs;
    }
  }
  if (pairs == 0) return 1.0;
  return sum / pairs;
}

double alignment_score(const Layout& layout, double alpha) {
  const size_t n = layout.elements.size();
  std::vector<double> cx(n), cy(n);
  double dist_sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Point c = center(layout.elements[i].box);
    cx[i] = c.x;
    cy[i] = c.y;
    dist_sum += std::hypot(c.x - 0.5, c.y - 0.5);
  }
  const double to_canvas = 1.0 - dist_sum / (static_cast<double>(n) * kSqrt2);
  const double to_peers = 1.0 - 0.5 * (variance_of(cx) + variance_of(cy));
  return clamp01(alpha * to_canvas + (1.0 - alpha) * to_peers);
}

double distribution_score(const Layout& layout) {
  const size_t n = layout.elements.size();
  std::vector<Point> centers(n);
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    centers[i] = center(layout.elements[i].box);
    mx += centers[i].x;
    my += centers[i].y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double spread = 0.0;
  bool occupied[3][3] = {};
  for (const Point& c : centers) {
    const double dx = c.x - mx, dy = c.y - my;
    spread += (dx * dx + dy * dy) / 2.0;  // squared diagonal of the unit canvas
    const int gx = std::clamp(static_cast<int>(std::floor(3.0 * c.x)), 0, 2);
    const int gy = std::clamp(static_cast<int>(std::floor(3.0 * c.y)), 0, 2);
    occupied[gx][gy] = true;
  }
  spread /= static_cast<double>(n);

  int cells = 0;
  for (const auto& row : occupied)
    for (bool o : row)
      if (o) ++cells;
  const double grid = static_cast<double>(cells) / 9.0;
  return clamp01(0.5 * (spread + grid));
}

double spacing_consistency(const Layout& layout) {
  const size_t n = layout.elements.size();
  if (n < 3) return 1.0;
  std::vector<std::pair<double, int>> centers;  // (vertical center, id)
  centers.reserve(n);
  for (const LayoutElement& e : layout.elements) {
    centers.emplace_back(e.box.y + e.box.h / 2.0, e.id);
  }
  std::sort(centers.begin(), centers.end());
  std::vector<double> spacings(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    spacings[i] = centers[i + 1].first - centers[i].first;
  }
  const double mean = mean_of(spacings);
  if (mean <= 0.0) return 1.0;
  return clamp01(1.0 - variance_of(spacings) / (mean * mean));
}

double underlay_text_score(const Layout& layout) {
  double sum = 0.0;
  int underlays = 0;
  for (const LayoutElement& u : layout.elements) {
    if (u.category != ElementCategory::kUnderlay) continue;
    ++underlays;
    int overlapping = 0;
    double contained_fraction = 0.0;
    for (const LayoutElement& t : layout.elements) {
      if (t.category != ElementCategory::kText) continue;
      const double inter = intersect_area(t.box, u.box);
      if (inter > 0.0) {
        ++overlapping;
        contained_fraction = std::min(1.0, inter / area(t.box));
      }
    }
    if (overlapping == 1) sum += contained_fraction;
  }
  if (underlays == 0) return 1.0;
  return sum / underlays;
}

double iou_reward(const Layout& layout, const Layout& reference) {
  std::array<int, kCategoryCount> got{}, want{};
  for (const LayoutElement& e : layout.elements) got[static_cast<int>(e.category)]++;
  for (const LayoutElement& e : reference.elements) want[static_cast<int>(e.category)]++;
  if (got != want) {
    throw std::invalid_argument("iou_reward: layouts are not comparable (category counts differ)");
  }
  if (reference.elements.empty()) return 0.0;

  double total = 0.0;
  for (int c = 0; c < kCategoryCount; ++c) {
    std::vector<const LayoutElement*> pred, ref;
    for (const LayoutElement& e : layout.elements)
      if (static_cast<int>(e.category) == c) pred.push_back(&e);
    for (const LayoutElement& e : reference.elements)
      if (static_cast<int>(e.category) == c) ref.push_back(&e);

    // All candidate pairs in (IoU desc, pred id asc, ref id asc) order,
    // greedily matched one-to-one.
    struct Pair {
      double score;
      int pred_id, ref_id;
      size_t pi, ri;
    };
    std::vector<Pair> pairs;
    pairs.reserve(pred.size() * ref.size());
    for (size_t i = 0; i < pred.size(); ++i) {
      for (size_t j = 0; j < ref.size(); ++j) {
        pairs.push_back({iou(pred[i]->box, ref[j]->box), pred[i]->id, ref[j]->id, i, j});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      return std::tie(b.score, a.pred_id, a.ref_id) < std::tie(a.score, b.pred_id, b.ref_id);
    });
    std::vector<bool> pred_used(pred.size(), false), ref_used(ref.size(), false);
    for (const Pair& p : pairs) {
      if (pred_used[p.pi] || ref_used[p.ri]) continue;
      pred_used[p.pi] = true;
      ref_used[p.ri] = true;
      total += p.score;
    }
  }
  return total / static_cast<double>(reference.elements.size());
}

double quality_reward(const Layout& layout, std::span<const BBox> saliency,
                      const QualityWeights& qw, const CompatibilityMatrix& compat,
                      RewardBreakdown* breakdown) {
  const double icr = inverse_collision(layout, saliency, compat);
  const double align = alignment_score(layout, qw.alpha);
  const double dist = distribution_score(layout);
  const double spacing = spacing_consistency(layout);
  const double underlay = underlay_text_score(layout);
  const double quality = qw.icr * icr + qw.align * align + qw.dist * dist +
                         qw.spacing * spacing + qw.underlay * underlay;
  if (breakdown) {
    breakdown->icr = icr;
    breakdown->align = align;
    breakdown->dist = dist;
    breakdown->spacing = spacing;
    breakdown->underlay = underlay;
    breakdown->quality = quality;
  }
  return quality;
}

RewardBreakdown hybrid_reward(const DualLevelOutput& out, const CanvasSpec& spec,
                              const Layout* reference, const RewardWeights& rw,
                              const QualityWeights& qw, const CompatibilityMatrix& compat) {
  RewardBreakdown b;
  b.format = format_reward(out.parse_status);

  if (out.parse_status == ParseStatus::kValid && out.layout) {
    quality_reward(*out.layout, spec.saliency, qw, compat, &b);
    if (reference) b.iou = iou_reward(*out.layout, *reference);
  } else if (reference) {
    b.iou = 0.0;  // an unparsable layout earns only format credit
  }

  double quality_weight = rw.quality_weight;
  double iou_weight = rw.iou_weight;
  if (!reference) {
    quality_weight += iou_weight;
    iou_weight = 0.0;
  }
  b.total = rw.format_weight * b.format + quality_weight * b.quality +
            iou_weight * b.iou.value_or(0.0);
  return b;
}

}  // namespace laylab
