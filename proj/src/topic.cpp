#include "maltopic/topic.hpp"

#include "maltopic/error.hpp"
#include "maltopic/parallel.hpp"
#include "maltopic/serialize.hpp"
#include "maltopic/text.hpp"
#include "prompts.hpp"

#include <algorithm>
#include <set>

namespace maltopic {

namespace {

std::string flatten(std::string_view text) {
  std::string out(text);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
  return out;
}

std::string topic_prompt_head() {
  return std::string(prompts::kPreamble) + prompts::kTopicTask + prompts::kTopicFormat + prompts::kResponsesHeader;
}

// Longest numbering prefix plus newline we budget for: "9999999. " + "\n".
constexpr std::int64_t kItemOverheadTokens = 3;

const json* find_key(const json& object, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (const auto it = object.find(key); it != object.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::vector<std::string> read_words(const json& value, const std::string& where) {
  std::vector<std::string> raw;
  if (value.is_array()) {
    for (const auto& w : value) {
      if (!w.is_string()) throw Error(ErrorKind::invalid_topic, where + ": representative_words must hold strings");
      raw.push_back(w.get<std::string>());
    }
  } else if (value.is_string()) {
    std::string current;
    for (const char c : value.get<std::string>()) {
      if (c == ',') {
        raw.push_back(current);
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    raw.push_back(current);
  } else {
    throw Error(ErrorKind::invalid_topic, where + ": representative_words must be an array of strings");
  }
  std::vector<std::string> words;
  std::set<std::string, std::less<>> seen;
  for (const auto& w : raw) {
    auto word = trim(w);
    if (word.empty()) continue;
    if (seen.insert(normalize_key(word)).second) words.push_back(std::move(word));
  }
  return words;
}

std::string read_text(const json& object, std::initializer_list<const char*> keys, const std::string& where,
                      const char* label, bool required) {
  const json* value = find_key(object, keys);
  if (!value) {
    if (required) throw Error(ErrorKind::invalid_topic, where + ": missing field '" + label + "'");
    return {};
  }
  if (!value->is_string()) throw Error(ErrorKind::invalid_topic, where + ": field '" + label + "' must be a string");
  auto text = trim(value->get<std::string>());
  if (required && text.empty()) throw Error(ErrorKind::invalid_topic, where + ": field '" + label + "' is empty");
  return text;
}

Topic read_topic(const json& entry, const std::string& where, bool strict) {
  if (!entry.is_object()) throw Error(ErrorKind::invalid_topic, where + ": not an object");
  Topic topic;
  topic.name = read_text(entry, {"name", "topic_name"}, where, "name", true);
  topic.description = read_text(entry, {"description"}, where, "description", strict);
  topic.respondent_profile =
      read_text(entry, {"respondent_profile", "respondent_profile_relevance"}, where, "respondent_profile", strict);
  const json* words = find_key(entry, {"representative_words", "words"});
  if (!words) throw Error(ErrorKind::invalid_topic, where + ": missing field 'representative_words'");
  topic.representative_words = read_words(*words, where);
  if (topic.representative_words.empty()) {
    throw Error(ErrorKind::invalid_topic, where + ": no representative words");
  }
  return topic;
}

std::vector<Topic> read_topic_array(const json& array, bool strict) {
  std::vector<Topic> topics;
  std::set<std::string, std::less<>> names;
  for (std::size_t i = 0; i < array.size(); ++i) {
    const std::string where = "topics[" + std::to_string(i) + "]";
    auto topic = read_topic(array[i], where, strict);
    if (!names.insert(normalize_key(topic.name)).second) {
      throw Error(ErrorKind::invalid_topic, where + ": topic name '" + topic.name + "' repeated");
    }
    topics.push_back(std::move(topic));
  }
  return topics;
}

}  // namespace

std::string canonical_text(const Topic& topic) {
  std::string out = topic.name;
  auto append = [&](std::string_view part) {
    if (part.empty()) return;
    if (!out.empty()) out.push_back(' ');
    out += part;
  };
  append(topic.description);
  for (const auto& w : topic.representative_words) append(w);
  return out;
}

std::vector<Batch> partition_into_batches(const std::vector<EnrichedResponse>& responses, const TokenBudget& budget,
                                          const BatchingOptions& options) {
  const auto limit = budget.effective_input_tokens();
  std::vector<Batch> batches;
  Batch current;
  std::int64_t used = options.prompt_overhead_tokens;
  for (const auto& response : responses) {
    if (response.excluded) continue;
    const auto cost = estimate_tokens(response.enriched_text) + options.per_item_overhead_tokens;
    if (options.prompt_overhead_tokens + cost > limit) {
      throw Error(ErrorKind::unsplittable_response,
                  "response " + response.record_id + " needs " + std::to_string(cost) + " tokens plus " +
                      std::to_string(options.prompt_overhead_tokens) + " overhead; limit is " + std::to_string(limit));
    }
    if (!current.empty() && used + cost > limit) {
      batches.push_back(std::move(current));
      current.clear();
      used = options.prompt_overhead_tokens;
    }
    current.push_back(response);
    used += cost;
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

std::string build_topic_prompt(const Batch& batch) {
  std::string prompt = topic_prompt_head();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    prompt += std::to_string(i + 1) + ". " + flatten(batch[i].enriched_text) + "\n";
  }
  prompt += prompts::kTopicAnswer;
  return prompt;
}

BatchingOptions topic_prompt_overheads() {
  return {estimate_tokens(topic_prompt_head()) + estimate_tokens(prompts::kTopicAnswer), kItemOverheadTokens};
}

std::string_view format_reminder() { return prompts::kFormatReminder; }

std::optional<std::string> extract_json_array(std::string_view text) {
  for (std::size_t start = text.find('['); start != std::string_view::npos; start = text.find('[', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    std::size_t end = std::string_view::npos;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '[' || c == '{') {
        ++depth;
      } else if (c == ']' || c == '}') {
        if (--depth == 0) {
          end = i;
          break;
        }
      }
    }
    if (end == std::string_view::npos) continue;
    const auto candidate = text.substr(start, end - start + 1);
    const json parsed = json::parse(candidate, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) continue;
    if (std::all_of(parsed.begin(), parsed.end(), [](const json& e) { return e.is_object(); })) {
      return std::string(candidate);
    }
  }
  return std::nullopt;
}

std::vector<Topic> parse_topics(std::string_view response_text) {
  const auto array = extract_json_array(response_text);
  if (!array) throw Error(ErrorKind::unparseable_output, "no JSON array of topic objects in the response");
  return read_topic_array(json::parse(*array), true);
}

std::vector<Topic> parse_topic_file(std::string_view json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::unparseable_output, std::string("topics file: ") + e.what());
  }
  if (parsed.is_object() && parsed.contains("topics")) parsed = parsed.at("topics");
  if (!parsed.is_array()) throw Error(ErrorKind::unparseable_output, "topics file must hold a JSON array of topics");
  return read_topic_array(parsed, false);
}

TopicBatchResult extract_topics(const Batch& batch, std::size_t batch_index, LlmGateway& gateway,
                                const GenerationParams& params) {
  if (batch.empty()) throw Error(ErrorKind::invalid_argument, "cannot extract topics from an empty batch");
  TopicBatchResult result;
  result.batch_index = batch_index;
  for (const auto& r : batch) result.record_ids.push_back(r.record_id);

  const auto prompt = build_topic_prompt(batch);
  std::string first_problem;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto text = attempt == 0 ? prompt : prompt + std::string(format_reminder());
    result.exchanges.push_back(gateway.request(text, params));
    try {
      auto topics = parse_topics(result.exchanges.back().response_text);
      if (topics.empty()) throw Error(ErrorKind::invalid_topic, "empty topic list");
      result.topics = std::move(topics);
      result.repair_retries = attempt;
      return result;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::unparseable_output && e.kind() != ErrorKind::invalid_topic) throw;
      if (first_problem.empty()) first_problem = e.what();
    }
  }
  throw Error(ErrorKind::unparseable_after_retry,
              "batch " + std::to_string(batch_index) + ": " + first_problem + " (repair retry also failed)");
}

std::vector<TopicBatchResult> model_topics(const std::vector<EnrichedResponse>& responses, LlmGateway& gateway,
                                           const GenerationParams& params, const TopicModelingOptions& options) {
  const auto batches = partition_into_batches(responses, gateway.budget(), topic_prompt_overheads());
  std::vector<TopicBatchResult> results(batches.size());
  const auto errors = parallel_for(batches.size(), options.parallelism, [&](std::size_t i) {
    results[i] = extract_topics(batches[i], i, gateway, params);
  });

  std::optional<ErrorKind> kind;
  std::string message;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      if (!kind) kind = e.kind();
      message += (message.empty() ? "" : "; ") + std::string("batch ") + std::to_string(i) + ": " + e.what();
    } catch (const std::exception& e) {
      if (!kind) kind = ErrorKind::stage_failure;
      message += (message.empty() ? "" : "; ") + std::string("batch ") + std::to_string(i) + ": " + e.what();
    }
  }
  if (kind) throw Error(*kind, message);
  return results;
}

}  // namespace maltopic
