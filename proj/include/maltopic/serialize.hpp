#pragma once

#include "maltopic/dedup.hpp"
#include "maltopic/enrichment.hpp"
#include "maltopic/llm.hpp"
#include "maltopic/metrics.hpp"
#include "maltopic/survey.hpp"
#include "maltopic/topic.hpp"

#include <json.hpp>

namespace maltopic {

using json = nlohmann::json;

void to_json(json& j, const FieldSchema& field);
void from_json(const json& j, FieldSchema& field);

void to_json(json& j, const GenerationParams& params);
void from_json(const json& j, GenerationParams& params);
void to_json(json& j, const TokenBudget& budget);
void from_json(const json& j, TokenBudget& budget);
void to_json(json& j, const CostModel& cost);
void from_json(const json& j, CostModel& cost);
void to_json(json& j, const ChatExchange& exchange);
void from_json(const json& j, ChatExchange& exchange);
void to_json(json& j, const UsageTotals& totals);

void to_json(json& j, const EnrichmentSpec& spec);
void from_json(const json& j, EnrichmentSpec& spec);
void to_json(json& j, const EnrichedResponse& response);
void from_json(const json& j, EnrichedResponse& response);

void to_json(json& j, const Topic& topic);
void from_json(const json& j, Topic& topic);
void to_json(json& j, const TopicBatchResult& result);
void from_json(const json& j, TopicBatchResult& result);

void to_json(json& j, const TopicSource& source);
void from_json(const json& j, TopicSource& source);
void to_json(json& j, const Provenance& provenance);
void from_json(const json& j, Provenance& provenance);
void to_json(json& j, const DedupResult& result);
void from_json(const json& j, DedupResult& result);

void to_json(json& j, const TopicCoherence& value);
void from_json(const json& j, TopicCoherence& value);
void to_json(json& j, const MetricsReport& report);
void from_json(const json& j, MetricsReport& report);

/// Two-space indented dump with a trailing newline.
std::string dump(const json& value);

}  // namespace maltopic
