#include "laylab/ablate.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

namespace laylab {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct SeedOutcome {
  double icr = 0.0, align = 0.0, dist = 0.0, spacing = 0.0, reward = 0.0;
};

SeedOutcome evaluate_policy(const PolicyParams& params, std::span<const CanvasSpec> suite,
                            std::span<const std::optional<Layout>> references,
                            const RewardWeights& rw, const QualityWeights& qw,
                            int group_size, uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  SeedOutcome out;
  int count = 0;
  for (size_t si = 0; si < suite.size(); ++si) {
    const Layout* reference = nullptr;
    if (!references.empty() && references[si]) reference = &*references[si];
    GroupSample group = sample_group(params, suite[si], group_size, rng);
    for (const Candidate& cand : group.candidates) {
      DualLevelOutput wrapped;
      wrapped.layout = cand.layout;
      wrapped.parse_status = ParseStatus::kValid;
      const RewardBreakdown b = hybrid_reward(wrapped, suite[si], reference, rw, qw);
      out.icr += b.icr;
      out.align += b.align;
      out.dist += b.dist;
      out.spacing += b.spacing;
      out.reward += b.total;
      ++count;
    }
  }
  const double n = count;
  out.icr /= n;
  out.align /= n;
  out.dist /= n;
  out.spacing /= n;
  out.reward /= n;
  return out;
}

}  // namespace

std::vector<AblateRow> run_ablation(std::span<const CanvasSpec> suite,
                                    std::span<const std::optional<Layout>> references,
                                    const AblateConfig& cfg, const QualityWeights& qw) {
  std::vector<AblateRow> rows;
  for (const char* name : kPresetNames) {
    const RewardWeights rw = *RewardWeights::preset(name);
    std::vector<double> icr, align, dist, spacing, composite, reward;
    for (int s = 0; s < cfg.seeds; ++s) {
      GrpoConfig grpo;
      grpo.iterations = cfg.iterations;
      grpo.group_size = cfg.group_size;
      grpo.learning_rate = cfg.learning_rate;
      grpo.seed = cfg.base_seed + static_cast<uint64_t>(s);
      const TrainResult trained = train(suite, grpo, rw, qw, references);
      const SeedOutcome o = evaluate_policy(trained.params, suite, references, rw, qw,
                                            cfg.eval_group_size, grpo.seed);
      icr.push_back(o.icr);
      align.push_back(o.align);
      dist.push_back(o.dist);
      spacing.push_back(o.spacing);
      composite.push_back((o.icr + o.align + o.dist + o.spacing) / 4.0);
      reward.push_back(o.reward);
    }
    AblateRow row;
    row.preset = name;
    row.weights = rw;
    row.icr = median(icr);
    row.align = median(align);
    row.dist = median(dist);
    row.spacing = median(spacing);
    row.composite = median(composite);
    row.mean_reward = median(reward);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ablation_table(std::span<const AblateRow> rows) {
  std::string out =
      "preset            lambda_f lambda_q lambda_u   icr    align  dist   spacing  "
      "composite  reward\n";
  char line[200];
  for (const AblateRow& r : rows) {
    std::snprintf(line, sizeof(line),
                  "%-17s %8.2f %8.2f %8.2f   %.4f %.4f %.4f %.4f   %.4f     %.4f\n",
                  r.preset.c_str(), r.weights.format_weight, r.weights.quality_weight,
                  r.weights.iou_weight, r.icr, r.align, r.dist, r.spacing, r.composite,
                  r.mean_reward);
    out += line;
  }
  return out;
}

std::string ablation_json(std::span<const AblateRow> rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const AblateRow& r : rows) {
    nlohmann::ordered_json jr;
    jr["preset"] = r.preset;
    jr["format_weight"] = r.weights.format_weight;
    jr["quality_weight"] = r.weights.quality_weight;
    jr["iou_weight"] = r.weights.iou_weight;
    jr["icr"] = r.icr;
    jr["align"] = r.align;
    jr["dist"] = r.dist;
    jr["spacing"] = r.spacing;
    jr["composite"] = r.composite;
    jr["mean_reward"] = r.mean_reward;
    j.push_back(std::move(jr));
  }
  return j.dump(2);
}

}  // namespace laylab
