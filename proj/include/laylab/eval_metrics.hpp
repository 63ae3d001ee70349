#ifndef LAYLAB_EVAL_METRICS_HPP_
#define LAYLAB_EVAL_METRICS_HPP_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "laylab/geometry.hpp"
#include "laylab/layout_model.hpp"

namespace laylab {

struct MetricsReport {
  double ove = 0.0;
  double und = 0.0;
  double occ = 0.0;
  int n_layouts = 0;
  bool und_vacuous = false;  // no layout in the batch contained an underlay

  struct PerLayout {
    double ove = 0.0;
    double und = 0.0;
    double occ = 0.0;
  };
  std::vector<PerLayout> per_layout;
};

struct EvalOptions {
  int resolution = 512;
  bool keep_per_layout = true;
  int jobs = 1;
};

// Mean pairwise IoU over non-underlay element pairs; 0 with fewer than two
// such elements. Lower is better.
double overlay(const Layout& layout);

// Fraction of underlays that fully contain at least one non-underlay element
// (containment within 1e-9 of the contained element's area). 1.0 when there
// are no underlays; *vacuous is set accordingly when provided.
double underlay_effectiveness(const Layout& layout, bool* vacuous = nullptr);

// Fraction of total salient area covered by any element; 0 with no saliency.
double occlusion(const Layout& layout, std::span<const BBox> saliency,
                 int resolution = 512);

using EvalItem = std::pair<Layout, std::vector<BBox>>;

// Per-layout metrics plus their means. Throws std::invalid_argument on an
// empty batch. Deterministic regardless of the jobs setting.
MetricsReport evaluate_batch(std::span<const EvalItem> items,
                             const EvalOptions& options = EvalOptions());

// CSV with fixed columns layout_id, ove, und, occ; ids must align with the
// report's per-layout entries.
std::string metrics_csv(const MetricsReport& report, std::span<const std::string> ids);

// JSON aggregate of the report.
std::string metrics_json(const MetricsReport& report);

}  // namespace laylab

#endif  // LAYLAB_EVAL_METRICS_HPP_
