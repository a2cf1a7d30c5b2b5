#include "maltopic/mock_backend.hpp"

#include "maltopic/digest.hpp"
#include "maltopic/error.hpp"
#include "maltopic/serialize.hpp"
#include "maltopic/text.hpp"
#include "prompts.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace maltopic {

namespace {

std::string words_of_field(std::string_view field) {
  std::string out(field);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::string capitalize(std::string word) {
  if (!word.empty() && static_cast<unsigned char>(word.front()) < 0x80) {
    word.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(word.front())));
  }
  return word;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep, std::string_view last_sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += (i + 1 == parts.size()) ? last_sep : sep;
    out += parts[i];
  }
  return out;
}

std::string_view between(std::string_view text, std::string_view open, std::string_view close) {
  const auto b = text.find(open);
  if (b == std::string_view::npos) return {};
  const auto start = b + open.size();
  const auto e = text.find(close, start);
  return text.substr(start, e == std::string_view::npos ? std::string_view::npos : e - start);
}

}  // namespace

BackendReply MockBackend::send(const std::string& prompt, const GenerationParams& params) {
  const std::size_t index = calls_++;
  {
    std::lock_guard lock(mutex_);
    prompts_.push_back(prompt);
  }
  for (int pending = pending_failures_.load(); pending > 0; pending = pending_failures_.load()) {
    if (pending_failures_.compare_exchange_weak(pending, pending - 1)) {
      throw Error(ErrorKind::transport_failure, "mock transport failure");
    }
  }
  if (responder_) {
    if (auto scripted = responder_(prompt, index)) return {std::move(*scripted), {}, {}};
  }
  if (prompt.find(prompts::kDedupInputHeader) != std::string::npos) return {dedup_rule(prompt), {}, {}};
  if (prompt.find(prompts::kResponsesHeader) != std::string::npos &&
      prompt.find(prompts::kTopicAnswer) != std::string::npos) {
    return {topic_rule(prompt), {}, {}};
  }
  if (prompt.find(prompts::kEnrichVerb) != std::string::npos &&
      prompt.find(prompts::kEnrichAnswer) != std::string::npos) {
    return {enrichment_rule(prompt), {}, {}};
  }
  return {"mock response " + sha256_hex(params.model_id + '\n' + prompt).substr(0, 16), {}, {}};
}

std::vector<std::string> MockBackend::prompts() const {
  std::lock_guard lock(mutex_);
  return prompts_;
}

std::string MockBackend::enrichment_rule(const std::string& prompt) {
  const std::string target(between(prompt, prompts::kEnrichVerb, prompts::kEnrichWith));
  std::string_view block = prompt;
  const auto rules_end = block.find("enriched response.\n\n");
  if (rules_end != std::string_view::npos) block.remove_prefix(rules_end + std::string_view("enriched response.\n\n").size());
  const auto answer = block.rfind(prompts::kEnrichAnswer);
  if (answer != std::string_view::npos) block = block.substr(0, answer);

  std::string_view context_block;
  std::string_view response;
  const std::string target_line = target + ": ";
  if (block.starts_with(target_line)) {
    response = block.substr(target_line.size());
  } else {
    const auto at = block.find("\n" + target_line);
    if (at == std::string_view::npos) return trim(block);
    context_block = block.substr(0, at);
    response = block.substr(at + 1 + target_line.size());
  }

  std::vector<std::string> clauses;
  std::istringstream lines{std::string(context_block)};
  for (std::string line; std::getline(lines, line);) {
    const auto colon = line.find(": ");
    const std::string field = colon == std::string::npos ? trim(line) : line.substr(0, colon);
    const std::string value = colon == std::string::npos ? std::string{} : trim(line.substr(colon + 2));
    if (value.empty()) continue;
    if (clauses.empty()) {
      clauses.push_back("As a " + value);
    } else {
      clauses.push_back("with " + value + " " + words_of_field(field));
    }
  }
  const std::string text = trim(response);
  if (clauses.empty()) return text;
  std::string prefix;
  for (const auto& c : clauses) prefix += (prefix.empty() ? "" : " ") + c;
  return prefix + ": " + text;
}

std::string MockBackend::topic_rule(const std::string& prompt) {
  const auto block = between(prompt, prompts::kResponsesHeader, prompts::kTopicAnswer);
  std::map<std::string, std::size_t, std::less<>> doc_frequency;
  std::istringstream lines{std::string(block)};
  const auto& stop = default_stopwords();
  for (std::string line; std::getline(lines, line);) {
    const auto dot = line.find(". ");
    if (dot != std::string::npos) line = line.substr(dot + 2);
    StopwordSet seen;
    for (const auto& token : split_whitespace(normalize_text(line))) {
      if (token.size() < 3 || stop.contains(token) || token == "years" || token == "experience") continue;
      if (std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) continue;
      if (seen.insert(token).second) ++doc_frequency[token];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(doc_frequency.begin(), doc_frequency.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > 12) ranked.resize(12);

  json topics = json::array();
  if (ranked.empty()) {
    topics.push_back({{"name", "General Feedback"},
                      {"description", "Responses without distinctive content words."},
                      {"respondent_profile", "All respondents in this batch."},
                      {"representative_words", {"feedback"}}});
  }
  for (std::size_t i = 0; i < ranked.size(); i += 3) {
    std::vector<std::string> words;
    for (std::size_t k = i; k < std::min(i + 3, ranked.size()); ++k) words.push_back(ranked[k].first);
    std::vector<std::string> title;
    for (const auto& w : words) title.push_back(capitalize(w));
    topics.push_back({{"name", join(title, ", ", " and ")},
                      {"description", "Responses that mention " + join(words, ", ", " or ") + "."},
                      {"respondent_profile", "Respondents whose answers mention " + words.front() + "."},
                      {"representative_words", words}});
  }
  return topics.dump();
}

std::string MockBackend::dedup_rule(const std::string& prompt) {
  const auto block = between(prompt, prompts::kDedupInputHeader, prompts::kDedupAnswer);
  json input;
  try {
    input = json::parse(block);
  } catch (const json::exception&) {
    return "[]";
  }
  json merged = json::array();
  std::map<std::string, std::size_t> slot;
  for (const auto& t : input) {
    const std::string name = t.value("name", "");
    const auto key = normalize_key(name);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, merged.size());
      merged.push_back({{"name", name},
                        {"description", t.value("description", "")},
                        {"respondent_profile", t.value("respondent_profile", "")},
                        {"representative_words", t.value("representative_words", json::array())},
                        {"source_topics", json::array({name})}});
      continue;
    }
    auto& target = merged[it->second];
    auto& words = target["representative_words"];
    for (const auto& w : t.value("representative_words", json::array())) {
      const auto wk = normalize_key(w.get<std::string>());
      const bool present = std::any_of(words.begin(), words.end(),
                                       [&](const json& x) { return normalize_key(x.get<std::string>()) == wk; });
      if (!present) words.push_back(w);
    }
    auto& sources = target["source_topics"];
    if (std::find(sources.begin(), sources.end(), json(name)) == sources.end()) sources.push_back(name);
  }
  return merged.dump();
}

}  // namespace maltopic
