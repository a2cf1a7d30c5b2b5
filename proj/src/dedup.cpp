#include "maltopic/dedup.hpp"

#include "maltopic/error.hpp"
#include "maltopic/serialize.hpp"
#include "maltopic/text.hpp"
#include "prompts.hpp"

#include <map>
#include <set>

namespace maltopic {

namespace {

struct SourcedTopic {
  Topic topic;
  std::vector<TopicSource> sources;
};

using Group = std::vector<SourcedTopic>;

// Thrown inside the LLM path to abandon it for the deterministic merge.
struct Fallback {
  std::string reason;
};

void add_source(std::vector<TopicSource>& sources, const TopicSource& source) {
  if (std::find(sources.begin(), sources.end(), source) == sources.end()) sources.push_back(source);
}

DedupResult from_groups(const Group& merged, DedupMethod method) {
  DedupResult result;
  result.method = method;
  for (const auto& s : merged) {
    result.topics.push_back(s.topic);
    result.provenance.push_back({s.topic.name, s.sources});
  }
  return result;
}

std::string build_dedup_prompt(const std::vector<Group>& groups) {
  json input = json::array();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& s : groups[g]) {
      input.push_back({{"group", g},
                       {"name", s.topic.name},
                       {"description", s.topic.description},
                       {"respondent_profile", s.topic.respondent_profile},
                       {"representative_words", s.topic.representative_words}});
    }
  }
  return std::string(prompts::kPreamble) + prompts::kDedupTask + prompts::kDedupFormat + prompts::kDedupInputHeader +
         input.dump() + prompts::kDedupAnswer;
}

struct MergedAnswer {
  std::vector<Topic> topics;
  std::vector<std::vector<std::string>> source_names;
};

MergedAnswer parse_merge_answer(std::string_view text) {
  const auto array = extract_json_array(text);
  if (!array) throw Error(ErrorKind::unparseable_output, "no JSON array of topic objects in the response");
  MergedAnswer answer;
  answer.topics = parse_topics(*array);
  const json parsed = json::parse(*array);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto it = parsed[i].find("source_topics");
    if (it == parsed[i].end() || !it->is_array() || it->empty()) {
      throw Error(ErrorKind::invalid_topic, "topics[" + std::to_string(i) + "]: missing source_topics");
    }
    std::vector<std::string> names;
    for (const auto& n : *it) {
      if (!n.is_string()) throw Error(ErrorKind::invalid_topic, "topics[" + std::to_string(i) + "]: bad source name");
      names.push_back(n.get<std::string>());
    }
    answer.source_names.push_back(std::move(names));
  }
  if (answer.topics.empty()) throw Error(ErrorKind::invalid_topic, "empty topic list");
  return answer;
}

class LlmMerger {
 public:
  LlmMerger(LlmGateway& gateway, const GenerationParams& params, std::vector<ChatExchange>& exchanges)
      : gateway_(gateway), params_(params), exchanges_(exchanges) {}

  Group merge(const std::vector<Group>& groups) {
    if (groups.size() == 1) return groups.front();
    const auto prompt = build_dedup_prompt(groups);
    if (estimate_tokens(prompt) > gateway_.budget().effective_input_tokens()) {
      if (groups.size() <= 2) throw Fallback{"merge prompt for two topic lists exceeds the input token budget"};
      const auto mid = groups.begin() + static_cast<std::ptrdiff_t>(groups.size() / 2);
      const std::vector<Group> left(groups.begin(), mid);
      const std::vector<Group> right(mid, groups.end());
      return merge({merge(left), merge(right)});
    }
    return resolve(groups, ask(prompt));
  }

 private:
  MergedAnswer ask(const std::string& prompt) {
    std::string problem;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const auto text = attempt == 0 ? prompt : prompt + std::string(format_reminder());
      exchanges_.push_back(gateway_.request(text, params_));
      try {
        return parse_merge_answer(exchanges_.back().response_text);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::unparseable_output && e.kind() != ErrorKind::invalid_topic) throw;
        if (problem.empty()) problem = e.what();
      }
    }
    throw Fallback{std::string(to_string(ErrorKind::unparseable_after_retry)) + ": " + problem};
  }

  static Group resolve(const std::vector<Group>& groups, const MergedAnswer& answer) {
    std::map<std::string, std::vector<const SourcedTopic*>> by_name;
    std::size_t total = 0;
    for (const auto& g : groups) {
      for (const auto& s : g) {
        by_name[normalize_key(s.topic.name)].push_back(&s);
        ++total;
      }
    }
    if (answer.topics.size() > total) {
      throw Fallback{"model returned " + std::to_string(answer.topics.size()) + " topics from " +
                     std::to_string(total) + " inputs"};
    }
    Group merged;
    for (std::size_t i = 0; i < answer.topics.size(); ++i) {
      SourcedTopic out{answer.topics[i], {}};
      for (const auto& name : answer.source_names[i]) {
        const auto it = by_name.find(normalize_key(name));
        if (it == by_name.end()) {
          throw Fallback{"topic '" + out.topic.name + "' cites unknown source '" + name + "'"};
        }
        for (const auto* source : it->second) {
          for (const auto& entry : source->sources) add_source(out.sources, entry);
        }
      }
      merged.push_back(std::move(out));
    }
    return merged;
  }

  LlmGateway& gateway_;
  const GenerationParams& params_;
  std::vector<ChatExchange>& exchanges_;
};

std::vector<Group> initial_groups(const std::vector<TopicBatchResult>& batch_results) {
  std::vector<Group> groups;
  for (const auto& batch : batch_results) {
    Group g;
    for (const auto& t : batch.topics) g.push_back({t, {{batch.batch_index, t.name}}});
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

std::string_view to_string(DedupMethod method) noexcept {
  switch (method) {
    case DedupMethod::llm: return "llm";
    case DedupMethod::deterministic: return "deterministic";
    case DedupMethod::skipped: return "skipped";
  }
  return "unknown";
}

DedupResult dedup_deterministic(const std::vector<TopicBatchResult>& batch_results) {
  std::vector<const TopicBatchResult*> ordered;
  for (const auto& b : batch_results) ordered.push_back(&b);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto* a, const auto* b) { return a->batch_index < b->batch_index; });

  Group merged;
  std::map<std::string, std::size_t> slot;
  std::vector<std::set<std::string, std::less<>>> word_keys;
  for (const auto* batch : ordered) {
    for (const auto& topic : batch->topics) {
      const auto key = normalize_key(topic.name);
      auto [it, inserted] = slot.emplace(key, merged.size());
      if (inserted) {
        merged.push_back({topic, {}});
        merged.back().topic.representative_words.clear();
        word_keys.emplace_back();
      }
      auto& target = merged[it->second];
      for (const auto& w : topic.representative_words) {
        if (word_keys[it->second].insert(normalize_key(w)).second) target.topic.representative_words.push_back(w);
      }
      add_source(target.sources, {batch->batch_index, topic.name});
    }
  }
  return from_groups(merged, DedupMethod::deterministic);
}

DedupResult dedup_llm(const std::vector<TopicBatchResult>& batch_results, LlmGateway& gateway,
                      const GenerationParams& params) {
  const auto groups = initial_groups(batch_results);
  if (groups.size() < 2) {
    return from_groups(groups.empty() ? Group{} : groups.front(), DedupMethod::skipped);
  }

  std::vector<ChatExchange> exchanges;
  DedupResult result;
  try {
    LlmMerger merger(gateway, params, exchanges);
    result = from_groups(merger.merge(groups), DedupMethod::llm);
  } catch (const Fallback& fallback) {
    result = dedup_deterministic(batch_results);
    result.fallback_reason = fallback.reason;
  }
  result.exchanges = std::move(exchanges);
  return result;
}

}  // namespace maltopic
