#pragma once

#include "maltopic/enrichment.hpp"
#include "maltopic/llm.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maltopic {

struct Topic {
  std::string name;
  std::string description;
  std::string respondent_profile;
  std::vector<std::string> representative_words;

  friend bool operator==(const Topic&, const Topic&) = default;
};

/// name + description + words joined by single spaces; what gets embedded.
std::string canonical_text(const Topic& topic);

struct TopicBatchResult {
  std::size_t batch_index = 0;
  std::vector<RecordId> record_ids;
  std::vector<Topic> topics;
  /// 0, or 1 when the repair prompt was needed.
  int repair_retries = 0;
  std::vector<ChatExchange> exchanges;
};

using Batch = std::vector<EnrichedResponse>;

struct BatchingOptions {
  std::int64_t prompt_overhead_tokens = 0;
  /// Added to every member's estimate (numbering and separators).
  std::int64_t per_item_overhead_tokens = 0;
};

/// Greedy next-fit packing in input order under
/// budget.effective_input_tokens(). Excluded responses are dropped. Throws
/// Error(unsplittable_response) if one response cannot fit on its own.
std::vector<Batch> partition_into_batches(const std::vector<EnrichedResponse>& responses, const TokenBudget& budget,
                                          const BatchingOptions& options = {});

std::string build_topic_prompt(const Batch& batch);

/// Estimated tokens for the fixed parts of a topic prompt, and for each
/// numbered response line beyond its own text. Summing these with the
/// members' estimates bounds estimate_tokens(build_topic_prompt(batch)).
BatchingOptions topic_prompt_overheads();

/// Appended to a prompt whose answer could not be parsed.
std::string_view format_reminder();

/// Returns the first balanced JSON array in `text` that parses and holds
/// only objects, or nullopt.
std::optional<std::string> extract_json_array(std::string_view text);

/// Throws Error(unparseable_output) if no JSON array of objects is present,
/// Error(invalid_topic) on a missing field, empty name, no representative
/// words or a repeated (case-insensitive) topic name. Duplicate words within
/// a topic are dropped, keeping the first.
std::vector<Topic> parse_topics(std::string_view response_text);

/// Lenient reader for externally produced topic files: description and
/// respondent_profile may be missing. Errors name the offending entry.
std::vector<Topic> parse_topic_file(std::string_view json_text);

TopicBatchResult extract_topics(const Batch& batch, std::size_t batch_index, LlmGateway& gateway,
                                const GenerationParams& params);

struct TopicModelingOptions {
  std::size_t parallelism = 4;
};

std::vector<TopicBatchResult> model_topics(const std::vector<EnrichedResponse>& responses, LlmGateway& gateway,
                                           const GenerationParams& params, const TopicModelingOptions& options = {});

}  // namespace maltopic
