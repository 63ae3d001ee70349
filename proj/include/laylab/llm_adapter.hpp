#ifndef LAYLAB_LLM_ADAPTER_HPP_
#define LAYLAB_LLM_ADAPTER_HPP_

#include <span>
#include <string>
#include <vector>

#include "laylab/critique.hpp"
#include "laylab/layout_model.hpp"

namespace laylab {

// Chat-completions endpoint settings. The API key is read from the named
// environment variable; requests go unauthenticated when it is unset.
struct EndpointConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080/v1
  std::string api_key_env = "LAYLAB_API_KEY";
  std::string model;
  double temperature = 0.9;
  int max_tokens = 1024;
  int timeout_ms = 30000;
  int retries = 2;
  int parallel = 4;
};

// Deterministic instruction prompt embedding the serialized environment and
// the expected <design>/<layout> response format.
std::string build_prompt(const CanvasSpec& spec);

struct SampledCandidates {
  std::vector<std::string> texts;        // one per request; empty on failure
  std::vector<double> latencies_ms;      // aligned with texts
};

// Issues n independent chat requests (parallel up to cfg.parallel). A request
// that still fails after retries yields an empty text, which downstream
// parsing grades as MISSING_BLOCK. Throws std::runtime_error only when every
// request failed.
SampledCandidates sample_candidates(const EndpointConfig& cfg, const std::string& prompt,
                                    int n);

struct RerankCandidate {
  std::string raw;
  DualLevelOutput parsed;
  RewardBreakdown reward;
};

struct RerankResult {
  std::vector<RerankCandidate> candidates;
  int winner = 0;  // argmax of total reward, lowest index on ties
  std::vector<double> latencies_ms;
};

// Parses and scores each candidate, then selects the best. Pure given its
// inputs. Throws std::invalid_argument on an empty candidate list.
RerankResult rerank(const CanvasSpec& spec, const Layout* reference,
                    std::span<const std::string> candidates, const RewardWeights& rw,
                    const QualityWeights& qw = QualityWeights(),
                    std::span<const double> latencies_ms = {});

std::string rerank_result_json(const RerankResult& result);

}  // namespace laylab

#endif  // LAYLAB_LLM_ADAPTER_HPP_
