#ifndef LAYLAB_POLICY_OPT_HPP_
#define LAYLAB_POLICY_OPT_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laylab/critique.hpp"
#include "laylab/layout_model.hpp"
#include "laylab/rng.hpp"

namespace laylab {

// Per-dimension bounds for the policy's log standard deviations.
inline constexpr double kLogStdMin = -6.907755278982137;  // log(1e-3)
inline constexpr double kLogStdMax = -0.6931471805599453;  // log(0.5)

// Box parameter dimensions, in raw-draw order.
enum BoxDim { kDimX = 0, kDimY = 1, kDimW = 2, kDimH = 3 };
inline constexpr int kBoxDims = 4;

// A placement slot: one per (element index, category) pair seen in a suite.
struct SlotKey {
  int index = 0;
  ElementCategory category = ElementCategory::kText;

  auto operator<=>(const SlotKey&) const = default;
};

struct SlotParams {
  std::array<double, kBoxDims> mean{};
  std::array<double, kBoxDims> log_std{};
};

// Diagonal-Gaussian placement policy over canvas slots. Raw draws are
// squashed through a sigmoid and mapped to in-bounds boxes, so every sample
// is a valid layout by construction.
class PolicyParams {
 public:
  std::map<SlotKey, SlotParams> slots;

  // Adds (without overwriting) one slot per element of the spec. Fresh slots
  // start as a deliberately poor prior: small elements scattered into
  // alternating top/bottom margin bands, the way an untrained generator
  // slams content against canvas edges. Training has to discover centering,
  // rhythm, and underlay pairing from there. mean_spread scales the scatter;
  // log-stds start at log(init_std).
  void ensure_slots(const CanvasSpec& spec, Rng& rng, double mean_spread = 1.0,
                    double init_std = 0.5);

  void clamp_log_std();

  std::string to_json() const;
  static PolicyParams from_json(const std::string& text);
};

struct GrpoConfig {
  int group_size = 8;
  double clip_eps = 0.2;
  double kl_beta = 0.01;
  double learning_rate = 0.01;
  int iterations = 2000;
  double advantage_std_floor = 1e-8;
  uint64_t seed = 0;
};

// Throws std::invalid_argument when outside G >= 2, eps in (0,1), beta >= 0.
void validate_config(const GrpoConfig& cfg);

struct Candidate {
  Layout layout;
  std::vector<double> raw;  // pre-squash draws, kBoxDims per element
  double log_prob_old = 0.0;
};

struct GroupSample {
  std::vector<Candidate> candidates;
  std::vector<double> rewards;
  std::vector<double> advantages;
};

// Maps a unit 4-vector to a valid in-bounds box: sizes span [0.01, 0.99] and
// positions scale with the remaining room.
BBox box_from_unit(double ux, double uy, double uw, double uh);

double sigmoid(double z);

// Draws group_size candidate layouts from the policy; rewards/advantages are
// left unfilled. Every candidate passes validate_layout against the spec.
GroupSample sample_group(const PolicyParams& params, const CanvasSpec& spec,
                         int group_size, Rng& rng);

// Group-standardized rewards: zero-mean, unit population std. Groups whose
// std falls below std_floor yield all zeros.
std::vector<double> normalize_advantages(std::span<const double> rewards,
                                         double std_floor = 1e-8);

// Gradient with the same slot shape as the policy.
using Gradient = std::map<SlotKey, SlotParams>;

struct ObjectiveValue {
  double value = 0.0;      // surrogate - beta * kl
  double surrogate = 0.0;  // mean of the clipped per-candidate terms
  double kl = 0.0;
  Gradient gradient;
};

// Clipped surrogate with a KL penalty toward the reference policy, plus its
// analytic gradient w.r.t. params. Advantages must be filled in.
ObjectiveValue grpo_objective(const PolicyParams& params, const PolicyParams& old,
                              const PolicyParams& ref, const GroupSample& group,
                              const GrpoConfig& cfg);

// Closed-form diagonal-Gaussian KL(params || ref) summed over slots and dims.
double policy_kl(const PolicyParams& params, const PolicyParams& ref);

struct IterationLog {
  int iteration = 0;
  double mean_reward = 0.0;
  double mean_format = 0.0;
  double mean_quality = 0.0;
  double mean_icr = 0.0;
  double mean_align = 0.0;
  double mean_dist = 0.0;
  double mean_spacing = 0.0;
  double mean_underlay = 0.0;
  std::optional<double> mean_iou;
  double kl = 0.0;
};

std::string log_to_jsonl(std::span<const IterationLog> log);

struct TrainResult {
  PolicyParams params;
  std::vector<IterationLog> log;
};

// GRPO training loop: per iteration and canvas, snapshot the policy, sample a
// group, score it with the hybrid reward, and take one ascent step on the
// clipped surrogate. references, when non-empty, must align with the suite.
// Throws std::runtime_error if the mean reward turns NaN.
TrainResult train(std::span<const CanvasSpec> suite, const GrpoConfig& cfg,
                  const RewardWeights& rw, const QualityWeights& qw = QualityWeights(),
                  std::span<const std::optional<Layout>> references = {},
                  const PolicyParams* init = nullptr);

struct GridSpec {
  int positions = 8;  // per axis
  int sizes = 4;      // per axis
};

struct OracleResult {
  Layout layout;
  double reward = 0.0;
  long long evaluated = 0;
};

// Exhaustive search over per-element grid placements, scored with the hybrid
// reward; ties keep the first configuration in lexicographic order. Throws
// std::invalid_argument when the configuration count exceeds 1e7.
OracleResult grid_oracle(const CanvasSpec& spec, const RewardWeights& rw,
                         const QualityWeights& qw = QualityWeights(),
                         const GridSpec& grid = GridSpec(),
                         const Layout* reference = nullptr);

// Nearest grid configuration for each element (sizes first, then positions).
Layout snap_to_grid(const Layout& layout, const GridSpec& grid);

}  // namespace laylab

#endif  // LAYLAB_POLICY_OPT_HPP_
