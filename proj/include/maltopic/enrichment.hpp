#pragma once

#include "maltopic/llm.hpp"
#include "maltopic/survey.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace maltopic {

struct EnrichmentSpec {
  std::string target_field;
  std::vector<std::string> context_fields;
  /// Opening clause of the task sentence, e.g. "A survey of nurses was
  /// conducted to understand shift scheduling".
  std::string survey_description = "A survey was conducted";

  /// Throws Error(invalid_spec) unless target_field is free text and every
  /// context field is structured in `schema`, with at least one context field.
  void validate(const std::vector<FieldSchema>& schema) const;
};

struct EnrichedResponse {
  RecordId record_id;
  std::string original_text;
  std::string enriched_text;
  /// Context values in spec order, exactly as sent to the model.
  std::vector<std::pair<std::string, std::string>> context_snapshot;
  bool excluded = false;
  /// Set when enrichment failed for this record under a tolerated failure rate.
  std::optional<std::string> error;
};

std::string build_enrichment_prompt(const SurveyRecord& record, const EnrichmentSpec& spec);

/// One record through the gateway. Blank free text yields an excluded
/// response without an LLM call. Gateway errors are rethrown with the record
/// id in the message, keeping their kind.
EnrichedResponse enrich_record(const SurveyRecord& record, const EnrichmentSpec& spec, LlmGateway& gateway,
                               const GenerationParams& params, ChatExchange* exchange_out = nullptr);

struct EnrichmentOptions {
  std::size_t parallelism = 4;
  /// Largest tolerated fraction of failed records, in [0, 1].
  double max_failure_fraction = 0.0;
};

struct EnrichmentRun {
  std::vector<EnrichedResponse> responses;  // one per record, dataset order
  std::vector<ChatExchange> exchanges;      // live or cached calls, dataset order
  std::vector<std::string> failures;        // "record_id: message"
};

/// Enriches every record independently. Throws Error(enrichment_failed) when
/// the failure fraction exceeds options.max_failure_fraction.
EnrichmentRun enrich_dataset(const SurveyDataset& dataset, const EnrichmentSpec& spec, LlmGateway& gateway,
                             const GenerationParams& params, const EnrichmentOptions& options = {});

}  // namespace maltopic
