#include "laylab/policy_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace laylab {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5 * log(2*pi)

double gaussian_log_pdf(double x, double mean, double log_std) {
  const double sigma = std::exp(log_std);
  const double z = (x - mean) / sigma;
  return -kHalfLog2Pi - log_std - 0.5 * z * z;
}

double grid_fraction(int i, int n) {
  return n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

BBox box_from_unit(double ux, double uy, double uw, double uh) {
  BBox b;
  b.w = 0.01 + uw * 0.98;
  b.h = 0.01 + uh * 0.98;
  b.x = ux * (1.0 - b.w);
  b.y = uy * (1.0 - b.h);
  return b;
}

void PolicyParams::ensure_slots(const CanvasSpec& spec, Rng& rng, double mean_spread,
                                double init_std) {
  for (const ElementSpec& e : spec.elements) {
    const SlotKey key{e.id, e.category};
    if (slots.contains(key)) continue;
    SlotParams p;
    const double band_side = e.id % 2 == 0 ? 1.0 : -1.0;
    p.mean[kDimX] = rng.gaussian(0.0, 2.8 * mean_spread);
    p.mean[kDimY] = band_side * (2.8 + std::abs(rng.gaussian(0.0, 0.6))) * mean_spread;
    p.mean[kDimW] = rng.gaussian(-1.5, 0.7);
    p.mean[kDimH] = rng.gaussian(-1.5, 0.7);
    const double log_std = std::clamp(std::log(init_std), kLogStdMin, kLogStdMax);
    for (int d = 0; d < kBoxDims; ++d) p.log_std[d] = log_std;
    slots.emplace(key, p);
  }
}

void PolicyParams::clamp_log_std() {
  for (auto& [key, p] : slots) {
    for (double& ls : p.log_std) ls = std::clamp(ls, kLogStdMin, kLogStdMax);
  }
}

std::string PolicyParams::to_json() const {
  nlohmann::ordered_json j;
  j["slots"] = nlohmann::ordered_json::array();
  for (const auto& [key, p] : slots) {
    nlohmann::ordered_json js;
    js["index"] = key.index;
    js["category"] = to_string(key.category);
    js["mean"] = p.mean;
    js["log_std"] = p.log_std;
    j["slots"].push_back(std::move(js));
  }
  return j.dump();
}

PolicyParams PolicyParams::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("policy params: bad JSON: ") + e.what());
  }
  PolicyParams params;
  for (const auto& js : j.at("slots")) {
    SlotKey key;
    key.index = js.at("index").get<int>();
    const auto cat = category_from_string(js.at("category").get<std::string>());
    if (!cat) throw std::invalid_argument("policy params: unknown category");
    key.category = *cat;
    SlotParams p;
    for (int d = 0; d < kBoxDims; ++d) {
      p.mean[d] = js.at("mean").at(d).get<double>();
      p.log_std[d] = js.at("log_std").at(d).get<double>();
    }
    params.slots[key] = p;
  }
  params.clamp_log_std();
  return params;
}

void validate_config(const GrpoConfig& cfg) {
  if (cfg.group_size < 2) throw std::invalid_argument("group_size must be >= 2");
  if (!(cfg.clip_eps > 0.0 && cfg.clip_eps < 1.0)) {
    throw std::invalid_argument("clip_eps must lie in (0, 1)");
  }
  if (cfg.kl_beta < 0.0) throw std::invalid_argument("kl_beta must be >= 0");
  if (cfg.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
}

GroupSample sample_group(const PolicyParams& params, const CanvasSpec& spec,
                         int group_size, Rng& rng) {
  if (group_size < 2) throw std::invalid_argument("sample_group: group_size must be >= 2");
  GroupSample group;
  group.candidates.reserve(group_size);
  for (int g = 0; g < group_size; ++g) {
    Candidate cand;
    cand.raw.reserve(spec.elements.size() * kBoxDims);
    cand.layout.elements.reserve(spec.elements.size());
    for (const ElementSpec& e : spec.elements) {
      const auto it = params.slots.find(SlotKey{e.id, e.category});
      if (it == params.slots.end()) {
        throw std::invalid_argument("policy has no slot for element " + std::to_string(e.id));
      }
      const SlotParams& sp = it->second;
      std::array<double, kBoxDims> raw{};
      std::array<double, kBoxDims> unit{};
      for (int d = 0; d < kBoxDims; ++d) {
        raw[d] = rng.gaussian(sp.mean[d], std::exp(sp.log_std[d]));
        unit[d] = sigmoid(raw[d]);
        cand.log_prob_old += gaussian_log_pdf(raw[d], sp.mean[d], sp.log_std[d]);
        cand.raw.push_back(raw[d]);
      }
      cand.layout.elements.push_back(
          LayoutElement{e.id, e.category,
                        box_from_unit(unit[kDimX], unit[kDimY], unit[kDimW], unit[kDimH])});
    }
    group.candidates.push_back(std::move(cand));
  }
  return group;
}

std::vector<double> normalize_advantages(std::span<const double> rewards, double std_floor) {
  if (rewards.size() < 2) {
    throw std::invalid_argument("normalize_advantages: need at least 2 rewards");
  }
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= n;
  const double stddev = std::sqrt(var);
  std::vector<double> adv(rewards.size(), 0.0);
  if (stddev < std_floor) return adv;
  for (size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / stddev;
  return adv;
}

double policy_kl(const PolicyParams& params, const PolicyParams& ref) {
  double kl = 0.0;
  for (const auto& [key, p] : params.slots) {
    const auto it = ref.slots.find(key);
    if (it == ref.slots.end()) {
      throw std::invalid_argument("policy_kl: reference is missing a slot");
    }
    const SlotParams& r = it->second;
    for (int d = 0; d < kBoxDims; ++d) {
      const double var_p = std::exp(2.0 * p.log_std[d]);
      const double var_r = std::exp(2.0 * r.log_std[d]);
      const double dm = p.mean[d] - r.mean[d];
      kl += r.log_std[d] - p.log_std[d] + (var_p + dm * dm) / (2.0 * var_r) - 0.5;
    }
  }
  return kl;
}

ObjectiveValue grpo_objective(const PolicyParams& params, const PolicyParams& old,
                              const PolicyParams& ref, const GroupSample& group,
                              const GrpoConfig& cfg) {
  if (group.advantages.size() != group.candidates.size()) {
    throw std::invalid_argument("grpo_objective: advantages not filled");
  }
  ObjectiveValue result;
  for (const auto& [key, p] : params.slots) result.gradient[key] = SlotParams{};

  const double group_count = static_cast<double>(group.candidates.size());
  for (size_t c = 0; c < group.candidates.size(); ++c) {
    const Candidate& cand = group.candidates[c];
    const double advantage = group.advantages[c];

    double lp_new = 0.0, lp_old = 0.0;
    for (size_t e = 0; e < cand.layout.elements.size(); ++e) {
      const LayoutElement& el = cand.layout.elements[e];
      const SlotKey key{el.id, el.category};
      const SlotParams& pn = params.slots.at(key);
      const SlotParams& po = old.slots.at(key);
      for (int d = 0; d < kBoxDims; ++d) {
        const double x = cand.raw[e * kBoxDims + d];
        lp_new += gaussian_log_pdf(x, pn.mean[d], pn.log_std[d]);
        lp_old += gaussian_log_pdf(x, po.mean[d], po.log_std[d]);
      }
    }
    const double ratio = std::exp(lp_new - lp_old);
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
    const double unclipped_term = ratio * advantage;
    const double clipped_term = clipped * advantage;
    result.surrogate += std::min(unclipped_term, clipped_term) / group_count;

    // The clipped branch is flat in theta whenever the min selects it.
    if (unclipped_term <= clipped_term) {
      const double coef = advantage * ratio / group_count;
      for (size_t e = 0; e < cand.layout.elements.size(); ++e) {
        const LayoutElement& el = cand.layout.elements[e];
        const SlotKey key{el.id, el.category};
        const SlotParams& pn = params.slots.at(key);
        SlotParams& g = result.gradient[key];
        for (int d = 0; d < kBoxDims; ++d) {
          const double x = cand.raw[e * kBoxDims + d];
          const double sigma2 = std::exp(2.0 * pn.log_std[d]);
          const double diff = x - pn.mean[d];
          g.mean[d] += coef * diff / sigma2;
          g.log_std[d] += coef * (diff * diff / sigma2 - 1.0);
        }
      }
    }
  }

  result.kl = policy_kl(params, ref);
  if (cfg.kl_beta != 0.0) {
    for (const auto& [key, p] : params.slots) {
      const SlotParams& r = ref.slots.at(key);
      SlotParams& g = result.gradient[key];
      for (int d = 0; d < kBoxDims; ++d) {
        const double var_p = std::exp(2.0 * p.log_std[d]);
        const double var_r = std::exp(2.0 * r.log_std[d]);
        g.mean[d] -= cfg.kl_beta * (p.mean[d] - r.mean[d]) / var_r;
        g.log_std[d] -= cfg.kl_beta * (var_p / var_r - 1.0);
      }
    }
  }
  result.value = result.surrogate - cfg.kl_beta * result.kl;
  return result;
}

std::string log_to_jsonl(std::span<const IterationLog> log) {
  std::string out;
  for (const IterationLog& l : log) {
    nlohmann::ordered_json j;
    j["iteration"] = l.iteration;
    j["mean_reward"] = l.mean_reward;
    j["format"] = l.mean_format;
    j["quality"] = l.mean_quality;
    j["icr"] = l.mean_icr;
    j["align"] = l.mean_align;
    j["dist"] = l.mean_dist;
    j["spacing"] = l.mean_spacing;
    j["underlay"] = l.mean_underlay;
    if (l.mean_iou) {
      j["iou"] = *l.mean_iou;
    } else {
      j["iou"] = nullptr;
    }
    j["kl"] = l.kl;
    out += j.dump();
    out += '\n';
  }
  return out;
}

TrainResult train(std::span<const CanvasSpec> suite, const GrpoConfig& cfg,
                  const RewardWeights& rw, const QualityWeights& qw,
                  std::span<const std::optional<Layout>> references,
                  const PolicyParams* init) {
  if (suite.empty()) throw std::invalid_argument("train: empty suite");
  if (!references.empty() && references.size() != suite.size()) {
    throw std::invalid_argument("train: references must align with the suite");
  }
  validate_config(cfg);
  validate_weights(qw);

  Rng rng(cfg.seed);
  TrainResult result;
  if (init) {
    result.params = *init;
    for (const CanvasSpec& spec : suite) result.params.ensure_slots(spec, rng);
  } else {
    for (const CanvasSpec& spec : suite) result.params.ensure_slots(spec, rng);
  }
  const PolicyParams ref = result.params;

  const bool any_reference = !references.empty() &&
                             std::any_of(references.begin(), references.end(),
                                         [](const auto& r) { return r.has_value(); });

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    IterationLog log_entry;
    log_entry.iteration = iter;
    double iou_sum = 0.0;
    int iou_count = 0;
    int candidates_total = 0;

    for (size_t si = 0; si < suite.size(); ++si) {
      const CanvasSpec& spec = suite[si];
      const Layout* reference = nullptr;
      if (!references.empty() && references[si]) reference = &*references[si];

      const PolicyParams old = result.params;
      GroupSample group = sample_group(old, spec, cfg.group_size, rng);

      group.rewards.reserve(group.candidates.size());
      for (const Candidate& cand : group.candidates) {
        DualLevelOutput out;
        out.layout = cand.layout;
        out.parse_status = ParseStatus::kValid;
        const RewardBreakdown b = hybrid_reward(out, spec, reference, rw, qw);
        group.rewards.push_back(b.total);
        log_entry.mean_reward += b.total;
        log_entry.mean_format += b.format;
        log_entry.mean_quality += b.quality;
        log_entry.mean_icr += b.icr;
        log_entry.mean_align += b.align;
        log_entry.mean_dist += b.dist;
        log_entry.mean_spacing += b.spacing;
        log_entry.mean_underlay += b.underlay;
        if (b.iou) {
          iou_sum += *b.iou;
          ++iou_count;
        }
        ++candidates_total;
      }
      group.advantages = normalize_advantages(group.rewards, cfg.advantage_std_floor);

      const ObjectiveValue obj = grpo_objective(result.params, old, ref, group, cfg);
      for (const auto& [key, g] : obj.gradient) {
        SlotParams& p = result.params.slots.at(key);
        for (int d = 0; d < kBoxDims; ++d) {
          p.mean[d] += cfg.learning_rate * g.mean[d];
          p.log_std[d] += cfg.learning_rate * g.log_std[d];
        }
      }
      result.params.clamp_log_std();
    }

    const double n = static_cast<double>(candidates_total);
    log_entry.mean_reward /= n;
    log_entry.mean_format /= n;
    log_entry.mean_quality /= n;
    log_entry.mean_icr /= n;
    log_entry.mean_align /= n;
    log_entry.mean_dist /= n;
    log_entry.mean_spacing /= n;
    log_entry.mean_underlay /= n;
    if (any_reference && iou_count > 0) log_entry.mean_iou = iou_sum / iou_count;
    log_entry.kl = policy_kl(result.params, ref);

    if (std::isnan(log_entry.mean_reward)) {
      throw std::runtime_error("training diverged: mean reward is NaN at iteration " +
                               std::to_string(iter));
    }
    result.log.push_back(log_entry);
  }
  return result;
}

OracleResult grid_oracle(const CanvasSpec& spec, const RewardWeights& rw,
                         const QualityWeights& qw, const GridSpec& grid,
                         const Layout* reference) {
  if (grid.positions < 1 || grid.sizes < 1) {
    throw std::invalid_argument("grid_oracle: grid must be positive");
  }
  const int base = grid.positions * grid.positions * grid.sizes * grid.sizes;
  const size_t n = spec.elements.size();
  double combos = 1.0;
  for (size_t i = 0; i < n; ++i) combos *= base;
  if (combos > 1e7) {
    throw std::invalid_argument("grid_oracle: combinatorial budget exceeded (" +
                                std::to_string(combos) + " > 1e7)");
  }

  DualLevelOutput out;
  out.parse_status = ParseStatus::kValid;
  Layout layout;
  for (const ElementSpec& e : spec.elements) {
    layout.elements.push_back(LayoutElement{e.id, e.category, BBox{0, 0, 0.5, 0.5}});
  }
  out.layout = layout;

  const auto apply_digit = [&](size_t element, long long digit) {
    const int px = static_cast<int>(digit % grid.positions);
    digit /= grid.positions;
    const int py = static_cast<int>(digit % grid.positions);
    digit /= grid.positions;
    const int sw = static_cast<int>(digit % grid.sizes);
    digit /= grid.sizes;
    const int sh = static_cast<int>(digit);
    BBox& b = out.layout->elements[element].box;
    b.w = 0.01 + 0.98 * grid_fraction(sw, grid.sizes);
    b.h = 0.01 + 0.98 * grid_fraction(sh, grid.sizes);
    b.x = grid_fraction(px, grid.positions) * (1.0 - b.w);
    b.y = grid_fraction(py, grid.positions) * (1.0 - b.h);
  };

  std::vector<long long> digits(n, 0);
  for (size_t i = 0; i < n; ++i) apply_digit(i, 0);

  OracleResult best;
  best.reward = -1.0;
  while (true) {
    const RewardBreakdown b = hybrid_reward(out, spec, reference, rw, qw);
    ++best.evaluated;
    if (b.total > best.reward) {
      best.reward = b.total;
      best.layout = *out.layout;
    }
    // Odometer increment, least significant digit on the last element.
    size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < base) {
        apply_digit(pos, digits[pos]);
        break;
      }
      digits[pos] = 0;
      apply_digit(pos, 0);
      if (pos == 0) return best;  // most significant digit wrapped: done
    }
  }
}

Layout snap_to_grid(const Layout& layout, const GridSpec& grid) {
  Layout snapped = layout;
  for (LayoutElement& e : snapped.elements) {
    const auto snap_axis = [&](double size, double pos, double* out_size, double* out_pos) {
      const double size_frac = (size - 0.01) / 0.98;
      int si = grid.sizes == 1
                   ? 0
                   : static_cast<int>(std::lround(size_frac * (grid.sizes - 1)));
      si = std::clamp(si, 0, grid.sizes - 1);
      *out_size = 0.01 + 0.98 * grid_fraction(si, grid.sizes);
      const double room = 1.0 - *out_size;
      const double pos_frac = room > 1e-12 ? std::clamp(pos / room, 0.0, 1.0) : 0.5;
      int pi = grid.positions == 1
                   ? 0
                   : static_cast<int>(std::lround(pos_frac * (grid.positions - 1)));
      pi = std::clamp(pi, 0, grid.positions - 1);
      *out_pos = grid_fraction(pi, grid.positions) * room;
    };
    snap_axis(e.box.w, e.box.x, &e.box.w, &e.box.x);
    snap_axis(e.box.h, e.box.y, &e.box.h, &e.box.y);
  }
  return snapped;
}

}  // namespace laylab
