#include "laylab/eval_metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <future>
#include <stdexcept>

#include <json.hpp>

namespace laylab {

double overlay(const Layout& layout) {
  std::vector<const BBox*> boxes;
  for (const LayoutElement& e : layout.elements) {
    if (e.category != ElementCategory::kUnderlay) boxes.push_back(&e.box);
  }
  if (boxes.size() < 2) return 0.0;
  double sum = 0.0;
  int pairs = 0;
  for (size_t i = 0; i < boxes.size(); ++i) {
    for (size_t j = i + 1; j < boxes.size(); ++j) {
      sum += iou(*boxes[i], *boxes[j]);
      ++pairs;
    }
  }
  return sum / pairs;
}

double underlay_effectiveness(const Layout& layout, bool* vacuous) {
  int underlays = 0, effective = 0;
  for (const LayoutElement& u : layout.elements) {
    if (u.category != ElementCategory::kUnderlay) continue;
    ++underlays;
    for (const LayoutElement& e : layout.elements) {
      if (e.category == ElementCategory::kUnderlay) continue;
      if (intersect_area(u.box, e.box) >= area(e.box) - 1e-9) {
        ++effective;
        break;
      }
    }
  }
  if (vacuous) *vacuous = (underlays == 0);
  if (underlays == 0) return 1.0;
  return static_cast<double>(effective) / underlays;
}

double occlusion(const Layout& layout, std::span<const BBox> saliency, int resolution) {
  if (saliency.empty()) return 0.0;
  std::vector<BBox> boxes;
  boxes.reserve(layout.elements.size());
  for (const LayoutElement& e : layout.elements) boxes.push_back(e.box);
  return rasterized_union_overlap(boxes, saliency, resolution);
}

namespace {

MetricsReport::PerLayout eval_one(const EvalItem& item, int resolution, bool* has_underlay) {
  MetricsReport::PerLayout p;
  bool vacuous = false;
  p.ove = overlay(item.first);
  p.und = underlay_effectiveness(item.first, &vacuous);
  p.occ = occlusion(item.first, item.second, resolution);
  *has_underlay = !vacuous;
  return p;
}

}  // namespace

MetricsReport evaluate_batch(std::span<const EvalItem> items, const EvalOptions& options) {
  if (items.empty()) throw std::invalid_argument("evaluate_batch: empty batch");

  const size_t n = items.size();
  std::vector<MetricsReport::PerLayout> per(n);
  std::vector<uint8_t> has_underlay(n, 0);

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) {
      bool hu = false;
      per[i] = eval_one(items[i], options.resolution, &hu);
      has_underlay[i] = hu;
    }
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<size_t> next{0};
    const int workers = std::min<size_t>(jobs, n);
    for (int wkr = 0; wkr < workers; ++wkr) {
      futures.push_back(std::async(std::launch::async, [&]() {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          bool hu = false;
          per[i] = eval_one(items[i], options.resolution, &hu);
          has_underlay[i] = hu;
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  MetricsReport report;
  report.n_layouts = static_cast<int>(n);
  bool any_underlay = false;
  for (size_t i = 0; i < n; ++i) {
    report.ove += per[i].ove;
    report.und += per[i].und;
    report.occ += per[i].occ;
    if (has_underlay[i]) any_underlay = true;
  }
  report.ove /= static_cast<double>(n);
  report.und /= static_cast<double>(n);
  report.occ /= static_cast<double>(n);
  report.und_vacuous = !any_underlay;
  if (report.und_vacuous) report.und = 1.0;
  if (options.keep_per_layout) report.per_layout = std::move(per);
  return report;
}

std::string metrics_csv(const MetricsReport& report, std::span<const std::string> ids) {
  if (ids.size() != report.per_layout.size()) {
    throw std::invalid_argument("metrics_csv: id count does not match per-layout entries");
  }
  std::string out = "layout_id,ove,und,occ\n";
  char nums[96];
  for (size_t i = 0; i < ids.size(); ++i) {
    const auto& p = report.per_layout[i];
    std::snprintf(nums, sizeof(nums), ",%.6f,%.6f,%.6f\n", p.ove, p.und, p.occ);
    out += ids[i];
    out += nums;
  }
  return out;
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["n_layouts"] = report.n_layouts;
  j["ove"] = report.ove;
  j["und"] = report.und;
  j["occ"] = report.occ;
  j["und_vacuous"] = report.und_vacuous;
  return j.dump();
}

}  // namespace laylab
