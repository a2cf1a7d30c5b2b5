#pragma once

#include "maltopic/llm.hpp"
#include "maltopic/topic.hpp"

#include <string>
#include <vector>

namespace maltopic {

struct TopicSource {
  std::size_t batch_index = 0;
  std::string topic_name;

  friend bool operator==(const TopicSource&, const TopicSource&) = default;
};

struct Provenance {
  std::string topic_name;
  std::vector<TopicSource> sources;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

enum class DedupMethod { llm, deterministic, skipped };

struct DedupResult {
  std::vector<Topic> topics;
  /// Parallel to `topics`.
  std::vector<Provenance> provenance;
  DedupMethod method = DedupMethod::skipped;
  /// Why the LLM path was abandoned, when it was.
  std::string fallback_reason;
  std::vector<ChatExchange> exchanges;
};

std::string_view to_string(DedupMethod method) noexcept;

/// Groups topics by normalize_key(name). The first member of a group (lowest
/// batch index, then list order) keeps its text; words are unioned in
/// first-seen order.
DedupResult dedup_deterministic(const std::vector<TopicBatchResult>& batch_results);

/// LLM merge with provenance recovered by matching the model's listed source
/// names. With fewer than two batches, topics pass through (method=skipped).
/// Any unmatched source, duplicate output name, expansion or parse failure
/// after one repair retry falls back to dedup_deterministic for the whole
/// pass. When the merge prompt exceeds the token budget, batch results are
/// merged pairwise in a tree.
DedupResult dedup_llm(const std::vector<TopicBatchResult>& batch_results, LlmGateway& gateway,
                      const GenerationParams& params);

}  // namespace maltopic
