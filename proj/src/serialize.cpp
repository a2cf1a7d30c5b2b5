#include "maltopic/serialize.hpp"

#include "maltopic/error.hpp"

namespace maltopic {

namespace {

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(out);
}

}  // namespace

void to_json(json& j, const FieldSchema& field) {
  j = {{"name", field.name}, {"kind", field.kind == FieldKind::free_text ? "free_text" : "structured"}};
  if (field.description) j["description"] = *field.description;
}

void from_json(const json& j, FieldSchema& field) {
  j.at("name").get_to(field.name);
  const auto kind = j.value("kind", std::string("structured"));
  if (kind == "free_text") {
    field.kind = FieldKind::free_text;
  } else if (kind == "structured") {
    field.kind = FieldKind::structured;
  } else {
    throw Error(ErrorKind::config_error, "field '" + field.name + "' has unknown kind '" + kind + "'");
  }
  if (j.contains("description") && !j.at("description").is_null()) field.description = j.at("description").get<std::string>();
}

void to_json(json& j, const GenerationParams& params) {
  j = {{"model_id", params.model_id},
       {"seed", params.seed},
       {"temperature", params.temperature},
       {"top_p", params.top_p},
       {"max_output_tokens", params.max_output_tokens}};
}

void from_json(const json& j, GenerationParams& params) {
  read_optional(j, "model_id", params.model_id);
  read_optional(j, "seed", params.seed);
  read_optional(j, "temperature", params.temperature);
  read_optional(j, "top_p", params.top_p);
  read_optional(j, "max_output_tokens", params.max_output_tokens);
}

void to_json(json& j, const TokenBudget& budget) {
  j = {{"max_input_tokens", budget.max_input_tokens},
       {"max_output_tokens", budget.max_output_tokens},
       {"safety_margin", budget.safety_margin}};
}

void from_json(const json& j, TokenBudget& budget) {
  read_optional(j, "max_input_tokens", budget.max_input_tokens);
  read_optional(j, "max_output_tokens", budget.max_output_tokens);
  read_optional(j, "safety_margin", budget.safety_margin);
}

void to_json(json& j, const CostModel& cost) {
  j = {{"input_usd_per_million_tokens", cost.input_usd_per_million_tokens},
       {"output_usd_per_million_tokens", cost.output_usd_per_million_tokens}};
}

void from_json(const json& j, CostModel& cost) {
  read_optional(j, "input_usd_per_million_tokens", cost.input_usd_per_million_tokens);
  read_optional(j, "output_usd_per_million_tokens", cost.output_usd_per_million_tokens);
}

void to_json(json& j, const ChatExchange& exchange) {
  j = {{"prompt_text", exchange.prompt_text},
       {"response_text", exchange.response_text},
       {"input_tokens", exchange.input_tokens},
       {"output_tokens", exchange.output_tokens},
       {"cost_usd", exchange.cost_usd},
       {"cached", exchange.cached}};
  if (!exchange.warnings.empty()) j["warnings"] = exchange.warnings;
}

void from_json(const json& j, ChatExchange& exchange) {
  j.at("prompt_text").get_to(exchange.prompt_text);
  j.at("response_text").get_to(exchange.response_text);
  j.at("input_tokens").get_to(exchange.input_tokens);
  j.at("output_tokens").get_to(exchange.output_tokens);
  j.at("cost_usd").get_to(exchange.cost_usd);
  exchange.cached = j.value("cached", false);
  exchange.warnings.clear();
  read_optional(j, "warnings", exchange.warnings);
}

void to_json(json& j, const UsageTotals& totals) {
  j = {{"exchanges", totals.exchanges},
       {"live_calls", totals.live_calls},
       {"input_tokens", totals.input_tokens},
       {"output_tokens", totals.output_tokens},
       {"cost_usd", totals.cost_usd}};
}

void to_json(json& j, const EnrichmentSpec& spec) {
  j = {{"target_field", spec.target_field},
       {"context_fields", spec.context_fields},
       {"survey_description", spec.survey_description}};
}

void from_json(const json& j, EnrichmentSpec& spec) {
  j.at("target_field").get_to(spec.target_field);
  j.at("context_fields").get_to(spec.context_fields);
  read_optional(j, "survey_description", spec.survey_description);
}

void to_json(json& j, const EnrichedResponse& response) {
  json context = json::array();
  for (const auto& [field, value] : response.context_snapshot) context.push_back({{"field", field}, {"value", value}});
  j = {{"record_id", response.record_id},
       {"original_text", response.original_text},
       {"enriched_text", response.enriched_text},
       {"context_snapshot", context},
       {"excluded", response.excluded}};
  if (response.error) j["error"] = *response.error;
}

void from_json(const json& j, EnrichedResponse& response) {
  j.at("record_id").get_to(response.record_id);
  j.at("original_text").get_to(response.original_text);
  j.at("enriched_text").get_to(response.enriched_text);
  response.context_snapshot.clear();
  for (const auto& entry : j.at("context_snapshot")) {
    response.context_snapshot.emplace_back(entry.at("field").get<std::string>(), entry.at("value").get<std::string>());
  }
  response.excluded = j.value("excluded", false);
  response.error.reset();
  if (j.contains("error") && !j.at("error").is_null()) response.error = j.at("error").get<std::string>();
}

void to_json(json& j, const Topic& topic) {
  j = {{"name", topic.name},
       {"description", topic.description},
       {"respondent_profile", topic.respondent_profile},
       {"representative_words", topic.representative_words}};
}

void from_json(const json& j, Topic& topic) {
  j.at("name").get_to(topic.name);
  j.at("description").get_to(topic.description);
  j.at("respondent_profile").get_to(topic.respondent_profile);
  j.at("representative_words").get_to(topic.representative_words);
}

void to_json(json& j, const TopicBatchResult& result) {
  j = {{"batch_index", result.batch_index},
       {"record_ids", result.record_ids},
       {"topics", result.topics},
       {"repair_retries", result.repair_retries},
       {"exchanges", result.exchanges}};
}

void from_json(const json& j, TopicBatchResult& result) {
  j.at("batch_index").get_to(result.batch_index);
  j.at("record_ids").get_to(result.record_ids);
  j.at("topics").get_to(result.topics);
  result.repair_retries = j.value("repair_retries", 0);
  result.exchanges.clear();
  read_optional(j, "exchanges", result.exchanges);
}

void to_json(json& j, const TopicSource& source) {
  j = {{"batch_index", source.batch_index}, {"topic_name", source.topic_name}};
}

void from_json(const json& j, TopicSource& source) {
  j.at("batch_index").get_to(source.batch_index);
  j.at("topic_name").get_to(source.topic_name);
}

void to_json(json& j, const Provenance& provenance) {
  j = {{"topic_name", provenance.topic_name}, {"sources", provenance.sources}};
}

void from_json(const json& j, Provenance& provenance) {
  j.at("topic_name").get_to(provenance.topic_name);
  j.at("sources").get_to(provenance.sources);
}

void to_json(json& j, const DedupResult& result) {
  j = {{"topics", result.topics},
       {"provenance", result.provenance},
       {"method", to_string(result.method)},
       {"exchanges", result.exchanges}};
  if (!result.fallback_reason.empty()) j["fallback_reason"] = result.fallback_reason;
}

void from_json(const json& j, DedupResult& result) {
  j.at("topics").get_to(result.topics);
  j.at("provenance").get_to(result.provenance);
  const auto method = j.at("method").get<std::string>();
  if (method == "llm") {
    result.method = DedupMethod::llm;
  } else if (method == "deterministic") {
    result.method = DedupMethod::deterministic;
  } else if (method == "skipped") {
    result.method = DedupMethod::skipped;
  } else {
    throw Error(ErrorKind::unparseable_output, "unknown dedup method '" + method + "'");
  }
  result.fallback_reason = j.value("fallback_reason", std::string{});
  result.exchanges.clear();
  read_optional(j, "exchanges", result.exchanges);
}

void to_json(json& j, const TopicCoherence& value) {
  j = {{"topic_name", value.topic_name}, {"score", value.score}, {"degenerate", value.degenerate}};
}

void from_json(const json& j, TopicCoherence& value) {
  j.at("topic_name").get_to(value.topic_name);
  j.at("score").get_to(value.score);
  value.degenerate = j.value("degenerate", false);
}

void to_json(json& j, const MetricsReport& report) {
  j = {{"coherence", report.coherence},
       {"diversity", report.diversity},
       {"avg_similarity", report.avg_similarity ? json(*report.avg_similarity) : json(nullptr)},
       {"coverage", report.coverage},
       {"theta", report.theta},
       {"per_topic_coherence", report.per_topic_coherence},
       {"covered_doc_ids", report.covered_doc_ids},
       {"flags", report.flags},
       {"topic_count", report.topic_count},
       {"document_count", report.document_count}};
}

void from_json(const json& j, MetricsReport& report) {
  j.at("coherence").get_to(report.coherence);
  j.at("diversity").get_to(report.diversity);
  report.avg_similarity.reset();
  if (!j.at("avg_similarity").is_null()) report.avg_similarity = j.at("avg_similarity").get<double>();
  j.at("coverage").get_to(report.coverage);
  read_optional(j, "theta", report.theta);
  j.at("per_topic_coherence").get_to(report.per_topic_coherence);
  j.at("covered_doc_ids").get_to(report.covered_doc_ids);
  read_optional(j, "flags", report.flags);
  read_optional(j, "topic_count", report.topic_count);
  read_optional(j, "document_count", report.document_count);
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

}  // namespace maltopic
