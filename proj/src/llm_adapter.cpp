#include "laylab/llm_adapter.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace laylab {

std::string build_prompt(const CanvasSpec& spec) {
  int masked = 0;
  for (const ElementSpec& e : spec.elements) {
    if (!e.geometry) ++masked;
  }
  std::string prompt;
  prompt +=
      "You are a graphic layout designer. Place the elements of the canvas "
      "environment below onto the canvas.\n\n";
  prompt += "Canvas environment (JSON):\n";
  prompt += serialize_spec(spec);
  prompt += "\n\n";
  prompt +=
      "Coordinates are normalized to [0,1] with x,y at the top-left corner. "
      "Elements whose geometry is masked must receive coordinates from you (" +
      std::to_string(masked) +
      " of them). Saliency boxes mark important image content that foreground "
      "elements should not cover; only underlays may sit on them. Every "
      "underlay must back exactly one text element and fully contain it.\n\n";
  prompt +=
      "Respond with exactly two blocks. First a <design> block with your "
      "reasoning about the arrangement, then a <layout> block whose body is "
      "JSON of the form\n"
      "{\"elements\": [{\"category\": \"text\", \"x\": 0.1, \"y\": 0.1, "
      "\"w\": 0.3, \"h\": 0.1}]}\n"
      "with one entry per input element, matching the input categories and "
      "counts, boxes inside the canvas.\n\n"
      "<design>\n...your reasoning...\n</design>\n<layout>\n...the JSON...\n</layout>\n";
  return prompt;
}

namespace {

struct Endpoint {
  std::string host_port;  // scheme://host:port
  std::string path_prefix;
};

Endpoint split_url(const std::string& base_url) {
  const size_t scheme = base_url.find("://");
  if (scheme == std::string::npos) {
    throw std::invalid_argument("endpoint url must start with http:// or https://");
  }
  const size_t path = base_url.find('/', scheme + 3);
  if (path == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path), prefix};
}

}  // namespace

SampledCandidates sample_candidates(const EndpointConfig& cfg, const std::string& prompt,
                                    int n) {
  if (n < 1) throw std::invalid_argument("sample_candidates: n must be >= 1");

  nlohmann::json body;
  body["model"] = cfg.model;
  body["messages"] = nlohmann::json::array(
      {nlohmann::json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = cfg.temperature;
  body["max_tokens"] = cfg.max_tokens;
  const std::string payload = body.dump();

  std::string api_key;
  if (const char* key = std::getenv(cfg.api_key_env.c_str())) api_key = key;

  const Endpoint ep = split_url(cfg.base_url);
  const std::string path = ep.path_prefix + "/chat/completions";

  SampledCandidates out;
  out.texts.assign(n, "");
  out.latencies_ms.assign(n, 0.0);

  const auto run_one = [&](int index) {
    const auto started = std::chrono::steady_clock::now();
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
      httplib::Client client(ep.host_port);
      client.set_connection_timeout(0, cfg.timeout_ms * 1000LL);
      client.set_read_timeout(0, cfg.timeout_ms * 1000LL);
      httplib::Headers headers;
      if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
      auto res = client.Post(path, headers, payload, "application/json");
      if (res && res->status == 200) {
        try {
          const auto j = nlohmann::json::parse(res->body);
          out.texts[index] =
              j.at("choices").at(0).at("message").at("content").get<std::string>();
          break;
        } catch (const nlohmann::json::exception&) {
          // malformed response body; fall through to retry
        }
      }
    }
    out.latencies_ms[index] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
  };

  const int workers = std::max(1, std::min(cfg.parallel, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_one(i);
      });
    }
    for (auto& t : threads) t.join();
  }

  bool any_ok = false;
  for (const std::string& t : out.texts) {
    if (!t.empty()) {
      any_ok = true;
      break;
    }
  }
  if (!any_ok) {
    throw std::runtime_error("endpoint unreachable: all " + std::to_string(n) +
                             " requests failed against " + cfg.base_url);
  }
  return out;
}

RerankResult rerank(const CanvasSpec& spec, const Layout* reference,
                    std::span<const std::string> candidates, const RewardWeights& rw,
                    const QualityWeights& qw, std::span<const double> latencies_ms) {
  if (candidates.empty()) throw std::invalid_argument("rerank: no candidates");
  RerankResult result;
  result.candidates.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    RerankCandidate c;
    c.raw = candidates[i];
    c.parsed = parse_dual_output(c.raw, spec);
    c.reward = hybrid_reward(c.parsed, spec, reference, rw, qw);
    result.candidates.push_back(std::move(c));
  }
  result.winner = 0;
  for (size_t i = 1; i < result.candidates.size(); ++i) {
    if (result.candidates[i].reward.total > result.candidates[result.winner].reward.total) {
      result.winner = static_cast<int>(i);
    }
  }
  if (!latencies_ms.empty()) {
    result.latencies_ms.assign(latencies_ms.begin(), latencies_ms.end());
  }
  return result;
}

std::string rerank_result_json(const RerankResult& result) {
  nlohmann::ordered_json j;
  j["winner"] = result.winner;
  j["candidates"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < result.candidates.size(); ++i) {
    const RerankCandidate& c = result.candidates[i];
    nlohmann::ordered_json jc;
    jc["index"] = i;
    jc["parse_status"] = to_string(c.parsed.parse_status);
    jc["reward"] = nlohmann::ordered_json::parse(to_json(c.reward));
    if (i < result.latencies_ms.size()) jc["latency_ms"] = result.latencies_ms[i];
    j["candidates"].push_back(std::move(jc));
  }
  return j.dump(2);
}

}  // namespace laylab
