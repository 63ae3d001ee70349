#ifndef LAYLAB_ABLATE_HPP_
#define LAYLAB_ABLATE_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laylab/policy_opt.hpp"

namespace laylab {

struct AblateConfig {
  int iterations = 300;
  int seeds = 5;
  uint64_t base_seed = 1;
  int group_size = 8;
  double learning_rate = 0.01;
  int eval_group_size = 8;
};

// One comparison row per reward-weight preset: medians over seeds of the
// mean structural sub-scores of layouts sampled from the trained policy.
struct AblateRow {
  std::string preset;
  RewardWeights weights;
  double icr = 0.0;
  double align = 0.0;
  double dist = 0.0;
  double spacing = 0.0;
  double composite = 0.0;  // mean of the four structural scores
  double mean_reward = 0.0;
};

// Trains one policy per (preset, seed) on the suite and reports structural
// metrics of the resulting policies. Row order matches kPresetNames.
std::vector<AblateRow> run_ablation(std::span<const CanvasSpec> suite,
                                    std::span<const std::optional<Layout>> references,
                                    const AblateConfig& cfg,
                                    const QualityWeights& qw = QualityWeights());

std::string ablation_table(std::span<const AblateRow> rows);
std::string ablation_json(std::span<const AblateRow> rows);

}  // namespace laylab

#endif  // LAYLAB_ABLATE_HPP_
