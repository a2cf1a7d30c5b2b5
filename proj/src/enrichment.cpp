#include "maltopic/enrichment.hpp"

#include "maltopic/error.hpp"
#include "maltopic/parallel.hpp"
#include "maltopic/text.hpp"
#include "prompts.hpp"

#include <algorithm>
#include <cmath>

namespace maltopic {

namespace {

std::string readable_field(std::string_view field) {
  std::string out(field);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::string readable_list(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += (i + 1 == fields.size()) ? " and " : ", ";
    out += readable_field(fields[i]);
  }
  return out;
}

const FieldSchema* find_field(const std::vector<FieldSchema>& schema, std::string_view name) {
  const auto it = std::find_if(schema.begin(), schema.end(), [&](const FieldSchema& f) { return f.name == name; });
  return it == schema.end() ? nullptr : &*it;
}

}  // namespace

void EnrichmentSpec::validate(const std::vector<FieldSchema>& schema) const {
  const auto* target = find_field(schema, target_field);
  if (!target) throw Error(ErrorKind::invalid_spec, "target field '" + target_field + "' is not in the schema");
  if (target->kind != FieldKind::free_text) {
    throw Error(ErrorKind::invalid_spec, "target field '" + target_field + "' is not free text");
  }
  if (context_fields.empty()) throw Error(ErrorKind::invalid_spec, "at least one context field is required");
  for (const auto& name : context_fields) {
    const auto* field = find_field(schema, name);
    if (!field) throw Error(ErrorKind::invalid_spec, "context field '" + name + "' is not in the schema");
    if (field->kind != FieldKind::structured) {
      throw Error(ErrorKind::invalid_spec, "context field '" + name + "' is not structured");
    }
  }
}

std::string build_enrichment_prompt(const SurveyRecord& record, const EnrichmentSpec& spec) {
  std::string prompt = prompts::kPreamble;
  prompt += spec.survey_description + " and given are the responses. ";
  prompt += prompts::kEnrichVerb + spec.target_field + prompts::kEnrichWith + readable_list(spec.context_fields) + ". ";
  prompt += prompts::kEnrichRules;
  prompt += "\n\n";
  for (const auto& field : spec.context_fields) prompt += field + ": " + record.value(field) + "\n";
  prompt += spec.target_field + ": " + record.value(spec.target_field);
  prompt += prompts::kEnrichAnswer;
  return prompt;
}

EnrichedResponse enrich_record(const SurveyRecord& record, const EnrichmentSpec& spec, LlmGateway& gateway,
                               const GenerationParams& params, ChatExchange* exchange_out) {
  EnrichedResponse out;
  out.record_id = record.record_id;
  out.original_text = record.value(spec.target_field);
  for (const auto& field : spec.context_fields) out.context_snapshot.emplace_back(field, record.value(field));

  if (is_blank(out.original_text)) {
    out.excluded = true;
    return out;
  }
  const auto prompt = build_enrichment_prompt(record, spec);
  try {
    auto exchange = gateway.request(prompt, params);
    out.enriched_text = trim(exchange.response_text);
    if (exchange_out) *exchange_out = std::move(exchange);
  } catch (const Error& e) {
    throw Error(e.kind(), "record " + record.record_id + ": " + e.what());
  }
  if (out.enriched_text.empty()) {
    throw Error(ErrorKind::provider_error, "record " + record.record_id + ": empty enrichment");
  }
  return out;
}

EnrichmentRun enrich_dataset(const SurveyDataset& dataset, const EnrichmentSpec& spec, LlmGateway& gateway,
                             const GenerationParams& params, const EnrichmentOptions& options) {
  spec.validate(dataset.schema);
  if (!(options.max_failure_fraction >= 0.0 && options.max_failure_fraction <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "max_failure_fraction must lie in [0, 1]");
  }
  const auto n = dataset.records.size();
  std::vector<EnrichedResponse> responses(n);
  std::vector<std::optional<ChatExchange>> exchanges(n);

  const auto errors = parallel_for(n, options.parallelism, [&](std::size_t i) {
    ChatExchange exchange;
    responses[i] = enrich_record(dataset.records[i], spec, gateway, params, &exchange);
    if (!responses[i].excluded) exchanges[i] = std::move(exchange);
  });

  EnrichmentRun run;
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    std::string message;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      message = e.what();
    }
    const auto& record = dataset.records[i];
    auto& failed = responses[i];
    failed = EnrichedResponse{};
    failed.record_id = record.record_id;
    failed.original_text = record.values.contains(spec.target_field) ? record.values.at(spec.target_field) : "";
    for (const auto& field : spec.context_fields) {
      const auto it = record.values.find(field);
      failed.context_snapshot.emplace_back(field, it == record.values.end() ? "" : it->second);
    }
    failed.excluded = true;
    failed.error = message;
    run.failures.push_back(record.record_id + ": " + message);
  }
  if (n > 0) {
    const double fraction = static_cast<double>(run.failures.size()) / static_cast<double>(n);
    if (fraction > options.max_failure_fraction) {
      throw Error(ErrorKind::enrichment_failed, std::to_string(run.failures.size()) + " of " + std::to_string(n) +
                                                    " records failed; first: " + run.failures.front());
    }
  }
  run.responses = std::move(responses);
  for (auto& e : exchanges) {
    if (e) run.exchanges.push_back(std::move(*e));
  }
  return run;
}

}  // namespace maltopic
