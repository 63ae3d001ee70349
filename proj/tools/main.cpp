// laylab command-line interface: scoring, evaluation, GRPO training,
// best-of-N reranking, rendering, synthetic data, and the ablation harness.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "laylab/ablate.hpp"
#include "laylab/critique.hpp"
#include "laylab/datakit.hpp"
#include "laylab/eval_metrics.hpp"
#include "laylab/llm_adapter.hpp"
#include "laylab/policy_opt.hpp"
#include "laylab/render.hpp"

namespace {

using namespace laylab;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

RewardWeights parse_reward_weights(const std::string& flag) {
  if (auto preset = RewardWeights::preset(flag)) return *preset;
  RewardWeights rw;
  if (std::sscanf(flag.c_str(), "%lf,%lf,%lf", &rw.format_weight, &rw.quality_weight,
                  &rw.iou_weight) != 3) {
    throw std::runtime_error("--weights expects a preset name or f,q,u");
  }
  if (rw.format_weight < 0 || rw.quality_weight < 0 || rw.iou_weight < 0 ||
      rw.format_weight + rw.quality_weight + rw.iou_weight <= 0) {
    throw std::runtime_error("--weights must be non-negative with a positive sum");
  }
  return rw;
}

struct Suite {
  std::vector<std::string> ids;
  std::vector<CanvasSpec> specs;
  std::vector<std::optional<Layout>> references;
  std::vector<std::vector<BBox>> saliency;
};

Suite load_suite(const std::string& path, bool strict) {
  const LoadResult loaded = load_annotations(path, LoadOptions{strict});
  for (const std::string& w : loaded.warnings) {
    std::cerr << "warning: " << path << ": " << w << "\n";
  }
  Suite suite;
  for (const AnnotationRecord& rec : loaded.records) {
    auto [spec, reference] = to_canvas_spec(rec);
    suite.ids.push_back(rec.id);
    suite.saliency.push_back(spec.saliency);
    suite.specs.push_back(std::move(spec));
    suite.references.push_back(std::move(reference));
  }
  return suite;
}

int cmd_score(const std::string& spec_path, const std::string& layout_path,
              const std::string& reference_path, const std::string& weights_flag,
              double alpha) {
  const CanvasSpec spec = parse_spec(read_file(spec_path));
  DualLevelOutput out = classify_layout_json(read_file(layout_path), spec);

  std::optional<Layout> reference;
  if (!reference_path.empty()) {
    DualLevelOutput ref = classify_layout_json(read_file(reference_path), spec);
    if (ref.parse_status != ParseStatus::kValid) {
      throw std::runtime_error("reference layout does not match the spec (" +
                               std::string(to_string(ref.parse_status)) + ")");
    }
    reference = std::move(*ref.layout);
  }

  QualityWeights qw;
  qw.alpha = alpha;
  const RewardWeights rw = parse_reward_weights(weights_flag);
  const RewardBreakdown b =
      hybrid_reward(out, spec, reference ? &*reference : nullptr, rw, qw);
  std::cout << to_json(b) << "\n";
  return 0;
}

int cmd_evaluate(const std::string& suite_path, const std::string& csv_path,
                 const std::string& json_path, int resolution, int jobs, bool strict) {
  const Suite suite = load_suite(suite_path, strict);
  std::vector<EvalItem> items;
  for (size_t i = 0; i < suite.specs.size(); ++i) {
    if (!suite.references[i]) continue;
    items.emplace_back(*suite.references[i], suite.saliency[i]);
  }
  EvalOptions options;
  options.resolution = resolution;
  options.jobs = jobs;
  const MetricsReport report = evaluate_batch(items, options);
  std::cout << metrics_json(report) << "\n";
  if (!csv_path.empty()) write_file(csv_path, metrics_csv(report, suite.ids));
  if (!json_path.empty()) write_file(json_path, metrics_json(report));
  return 0;
}

int cmd_train(const std::string& suite_path, GrpoConfig cfg, const std::string& weights_flag,
              const std::string& out_path, const std::string& log_path, bool use_references,
              const std::string& init_path) {
  const Suite suite = load_suite(suite_path, false);
  const RewardWeights rw = parse_reward_weights(weights_flag);
  std::vector<std::optional<Layout>> references;
  if (use_references) references = suite.references;

  std::optional<PolicyParams> init;
  if (!init_path.empty()) init = PolicyParams::from_json(read_file(init_path));

  const TrainResult result = train(suite.specs, cfg, rw, QualityWeights(), references,
                                   init ? &*init : nullptr);
  if (!out_path.empty()) write_file(out_path, result.params.to_json());
  if (!log_path.empty()) write_file(log_path, log_to_jsonl(result.log));
  if (!result.log.empty()) {
    std::cout << "iterations: " << result.log.size()
              << "  first mean reward: " << result.log.front().mean_reward
              << "  last mean reward: " << result.log.back().mean_reward << "\n";
  } else {
    std::cout << "iterations: 0 (params unchanged)\n";
  }
  return 0;
}

int cmd_rerank(const std::string& spec_path, int n, EndpointConfig endpoint,
               const std::string& weights_flag, const std::string& out_path,
               const std::string& winner_path, const std::string& reference_path) {
  const CanvasSpec spec = parse_spec(read_file(spec_path));
  std::optional<Layout> reference;
  if (!reference_path.empty()) {
    DualLevelOutput ref = classify_layout_json(read_file(reference_path), spec);
    if (ref.parse_status != ParseStatus::kValid) {
      throw std::runtime_error("reference layout does not match the spec");
    }
    reference = std::move(*ref.layout);
  }
  const RewardWeights rw = parse_reward_weights(weights_flag);

  const std::string prompt = build_prompt(spec);
  const SampledCandidates sampled = sample_candidates(endpoint, prompt, n);
  const RerankResult result = rerank(spec, reference ? &*reference : nullptr, sampled.texts,
                                     rw, QualityWeights(), sampled.latencies_ms);

  if (!out_path.empty()) write_file(out_path, rerank_result_json(result));
  std::string effective_winner_path = winner_path;
  if (effective_winner_path.empty() && !out_path.empty()) {
    effective_winner_path = out_path + ".winner.json";
  }
  const RerankCandidate& winner = result.candidates[result.winner];
  if (winner.parsed.parse_status == ParseStatus::kValid && !effective_winner_path.empty()) {
    write_file(effective_winner_path, serialize_layout(*winner.parsed.layout));
  }
  std::cout << "winner: candidate " << result.winner << " ("
            << to_string(winner.parsed.parse_status)
            << ", total " << winner.reward.total << ")\n";
  return 0;
}

int cmd_render(const std::string& layout_path, const std::string& spec_path,
               const std::string& out_path, int width, int height) {
  Layout layout;
  std::vector<BBox> saliency;
  if (!spec_path.empty()) {
    const CanvasSpec spec = parse_spec(read_file(spec_path));
    DualLevelOutput out = classify_layout_json(read_file(layout_path), spec);
    if (out.parse_status != ParseStatus::kValid) {
      throw std::runtime_error("layout does not match the spec (" +
                               std::string(to_string(out.parse_status)) + ")");
    }
    layout = std::move(*out.layout);
    saliency = spec.saliency;
  } else {
    layout = parse_layout_json(read_file(layout_path));
  }
  RenderStyle style;
  if (width > 0) style.width = width;
  if (height > 0) style.height = height;
  const std::string svg = render_svg(layout, saliency, style);
  if (out_path.empty()) {
    std::cout << svg;
  } else {
    write_file(out_path, svg);
  }
  return 0;
}

int cmd_gen(const std::string& mode, int count, uint64_t seed, const std::string& out_path,
            SynthConfig cfg, const std::string& split) {
  if (mode == "random") {
    cfg.mode = SynthConfig::Mode::kRandom;
  } else if (mode == "designed") {
    cfg.mode = SynthConfig::Mode::kDesigned;
  } else {
    throw std::runtime_error("--mode must be random or designed");
  }
  cfg.seed = seed;
  const std::vector<SynthCanvas> canvases = generate_synthetic(cfg, count);
  std::vector<AnnotationRecord> records;
  for (size_t i = 0; i < canvases.size(); ++i) {
    records.push_back(to_annotation(canvases[i].spec, *canvases[i].reference,
                                    mode + "-" + std::to_string(seed) + "-" +
                                        std::to_string(i),
                                    split));
  }
  write_annotations(out_path, records);
  std::cout << "wrote " << records.size() << " canvases to " << out_path << "\n";
  return 0;
}

int cmd_ablate(const std::string& suite_path, AblateConfig cfg, const std::string& out_path) {
  const Suite suite = load_suite(suite_path, false);
  const std::vector<AblateRow> rows =
      run_ablation(suite.specs, suite.references, cfg);
  std::cout << ablation_table(rows);
  if (!out_path.empty()) write_file(out_path, ablation_json(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laylab: spatial layout critique, GRPO policy training, and evaluation"};
  app.require_subcommand(1);

  // score
  auto* score = app.add_subcommand("score", "Score a layout against a canvas spec");
  std::string score_spec, score_layout, score_reference, score_weights = "quality_focused";
  double score_alpha = 0.5;
  score->add_option("--spec", score_spec, "Canvas environment JSON")->required();
  score->add_option("--layout", score_layout, "Layout JSON")->required();
  score->add_option("--reference", score_reference, "Reference layout JSON");
  score->add_option("--weights", score_weights, "Reward preset or f,q,u");
  score->add_option("--alpha", score_alpha, "Alignment mixing factor");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Ove/Und/Occ metrics over a JSONL suite");
  std::string eval_suite, eval_csv, eval_json;
  int eval_resolution = 512, eval_jobs = 1;
  bool eval_strict = false;
  evaluate->add_option("--suite", eval_suite, "Annotation JSONL")->required();
  evaluate->add_option("--out-csv", eval_csv, "Per-layout CSV path");
  evaluate->add_option("--out-json", eval_json, "Aggregate JSON path");
  evaluate->add_option("--resolution", eval_resolution, "Occlusion raster resolution");
  evaluate->add_option("--jobs", eval_jobs, "Parallel scoring jobs");
  evaluate->add_flag("--strict", eval_strict, "Malformed lines are fatal");

  // train
  auto* train_cmd = app.add_subcommand("train", "GRPO training on a canvas suite");
  std::string train_suite, train_weights = "quality_focused", train_out, train_log,
              train_init;
  bool train_use_references = false;
  GrpoConfig grpo;
  train_cmd->add_option("--suite", train_suite, "Annotation JSONL")->required();
  train_cmd->add_option("--iters", grpo.iterations, "Training iterations");
  train_cmd->add_option("--group-size", grpo.group_size, "Candidates per group");
  train_cmd->add_option("--clip-eps", grpo.clip_eps, "Ratio clip width");
  train_cmd->add_option("--kl-beta", grpo.kl_beta, "KL penalty strength");
  train_cmd->add_option("--lr", grpo.learning_rate, "Learning rate");
  train_cmd->add_option("--weights", train_weights, "Reward preset or f,q,u");
  train_cmd->add_option("--seed", grpo.seed, "RNG seed");
  train_cmd->add_option("--out", train_out, "Write final policy params JSON");
  train_cmd->add_option("--log", train_log, "Write training log JSONL");
  train_cmd->add_option("--init", train_init, "Start from saved policy params");
  train_cmd->add_flag("--use-references", train_use_references,
                      "Use suite geometry as IoU references");

  // rerank
  auto* rerank_cmd = app.add_subcommand("rerank", "Best-of-N sampling via a chat endpoint");
  std::string rr_spec, rr_weights = "quality_focused", rr_out, rr_winner, rr_reference;
  int rr_n = 4;
  EndpointConfig endpoint;
  rerank_cmd->add_option("--spec", rr_spec, "Canvas environment JSON")->required();
  rerank_cmd->add_option("--n", rr_n, "Number of candidates");
  rerank_cmd->add_option("--endpoint", endpoint.base_url, "Base URL, e.g. http://host:port/v1")
      ->required();
  rerank_cmd->add_option("--model", endpoint.model, "Model name")->required();
  rerank_cmd->add_option("--weights", rr_weights, "Reward preset or f,q,u");
  rerank_cmd->add_option("--temperature", endpoint.temperature, "Sampling temperature");
  rerank_cmd->add_option("--max-tokens", endpoint.max_tokens, "Response token cap");
  rerank_cmd->add_option("--timeout-ms", endpoint.timeout_ms, "Per-request timeout");
  rerank_cmd->add_option("--retries", endpoint.retries, "Retries per request");
  rerank_cmd->add_option("--parallel", endpoint.parallel, "Concurrent requests");
  rerank_cmd->add_option("--api-key-env", endpoint.api_key_env,
                         "Environment variable holding the API key");
  rerank_cmd->add_option("--out", rr_out, "Write RerankResult JSON");
  rerank_cmd->add_option("--winner-out", rr_winner, "Write winning layout JSON");
  rerank_cmd->add_option("--reference", rr_reference, "Reference layout JSON");

  // render
  auto* render_cmd = app.add_subcommand("render", "Render a layout to SVG");
  std::string rd_layout, rd_spec, rd_out;
  int rd_width = 0, rd_height = 0;
  render_cmd->add_option("--layout", rd_layout, "Layout JSON")->required();
  render_cmd->add_option("--spec", rd_spec, "Canvas spec (for saliency boxes)");
  render_cmd->add_option("--out", rd_out, "Output SVG path (stdout when omitted)");
  render_cmd->add_option("--width", rd_width, "Output width in px");
  render_cmd->add_option("--height", rd_height, "Output height in px");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate synthetic canvases as annotation JSONL");
  std::string gen_mode = "random", gen_out, gen_split = "train";
  int gen_count = 10;
  uint64_t gen_seed = 0;
  SynthConfig synth;
  gen->add_option("--mode", gen_mode, "random|designed");
  gen->add_option("--count", gen_count, "Number of canvases");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "Output JSONL path")->required();
  gen->add_option("--min-elements", synth.min_elements, "Minimum elements per canvas");
  gen->add_option("--max-elements", synth.max_elements, "Maximum elements per canvas");
  gen->add_option("--underlay-prob", synth.underlay_prob, "Underlay probability");
  gen->add_option("--min-saliency", synth.min_saliency, "Minimum saliency boxes");
  gen->add_option("--max-saliency", synth.max_saliency, "Maximum saliency boxes");
  gen->add_option("--canvas-width", synth.canvas_width, "Canvas width in px");
  gen->add_option("--canvas-height", synth.canvas_height, "Canvas height in px");
  gen->add_option("--split", gen_split, "Split tag (train|test)");
  bool gen_no_emb = false;
  gen->add_flag("--no-embellishment", gen_no_emb, "Exclude embellishment elements");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Compare the four reward-weight presets");
  std::string ab_suite, ab_out;
  AblateConfig ab_cfg;
  ablate->add_option("--suite", ab_suite, "Annotation JSONL")->required();
  ablate->add_option("--iters", ab_cfg.iterations, "Training iterations per run");
  ablate->add_option("--seeds", ab_cfg.seeds, "Seeds per preset");
  ablate->add_option("--seed", ab_cfg.base_seed, "Base RNG seed");
  ablate->add_option("--group-size", ab_cfg.group_size, "Candidates per group");
  ablate->add_option("--lr", ab_cfg.learning_rate, "Learning rate");
  ablate->add_option("--out", ab_out, "Write comparison rows JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage error
  }

  try {
    if (score->parsed()) {
      return cmd_score(score_spec, score_layout, score_reference, score_weights, score_alpha);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_suite, eval_csv, eval_json, eval_resolution, eval_jobs,
                          eval_strict);
    }
    if (train_cmd->parsed()) {
      return cmd_train(train_suite, grpo, train_weights, train_out, train_log,
                       train_use_references, train_init);
    }
    if (rerank_cmd->parsed()) {
      return cmd_rerank(rr_spec, rr_n, endpoint, rr_weights, rr_out, rr_winner, rr_reference);
    }
    if (render_cmd->parsed()) {
      return cmd_render(rd_layout, rd_spec, rd_out, rd_width, rd_height);
    }
    if (gen->parsed()) {
      synth.allow_embellishment = !gen_no_emb;
      return cmd_gen(gen_mode, gen_count, gen_seed, gen_out, synth, gen_split);
    }
    if (ablate->parsed()) {
      return cmd_ablate(ab_suite, ab_cfg, ab_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
