#pragma once

#include "maltopic/dedup.hpp"
#include "maltopic/embedding.hpp"
#include "maltopic/enrichment.hpp"
#include "maltopic/llm.hpp"
#include "maltopic/metrics.hpp"
#include "maltopic/survey.hpp"
#include "maltopic/topic.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace maltopic {

enum class CorpusChoice { enriched, original };

struct BackendConfig {
  std::string kind = "mock";  // mock | openai
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "MALTOPIC_API_KEY";
};

struct EmbedderConfig {
  std::string kind = "hashing";  // hashing | openai
  std::string model = "text-embedding-3-small";
  long dimension = 256;
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "MALTOPIC_API_KEY";
};

struct PipelineConfig {
  std::filesystem::path input;
  std::vector<FieldSchema> schema;
  CsvOptions csv;
  EnrichmentSpec enrichment;
  GenerationParams generation;
  TokenBudget budget;
  CostModel cost;
  MetricsConfig metrics;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path output_dir;
  std::size_t parallelism = 4;
  CorpusChoice corpus = CorpusChoice::enriched;
  double max_failure_fraction = 0.0;
  std::optional<std::filesystem::path> stopwords_file;
  BackendConfig backend;
  EmbedderConfig embedder;

  /// Throws Error(config_error) on inconsistent settings.
  void validate() const;
};

/// Reads a JSON config. Relative paths resolve against the config file's
/// directory. Throws Error(config_error).
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const PipelineConfig& config);

struct CostSummary {
  std::int64_t exchanges = 0;
  std::int64_t cached_exchanges = 0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double total_usd = 0.0;
};

CostSummary summarize_cost(const std::vector<const std::vector<ChatExchange>*>& groups);

struct RunArtifacts {
  std::string target_field;
  std::vector<EnrichedResponse> enriched;
  std::vector<ChatExchange> enrichment_exchanges;
  std::vector<TopicBatchResult> batches;
  std::optional<DedupResult> dedup;
  std::optional<MetricsReport> metrics;
  CostSummary cost;
  nlohmann::json manifest;
};

/// Artifact file names inside a run directory.
namespace artifact {
inline constexpr const char* enriched = "enriched.json";
inline constexpr const char* enrichment_exchanges = "enrichment_exchanges.json";
inline constexpr const char* batches = "batches.json";
inline constexpr const char* dedup = "dedup.json";
inline constexpr const char* metrics = "metrics.json";
inline constexpr const char* cost = "cost.json";
inline constexpr const char* report = "report.md";
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* lock = ".lock";
}  // namespace artifact

/// GatewayOptions built from the config's budget, cost model and cache dir.
GatewayOptions gateway_options(const PipelineConfig& config);

/// ingest -> enrich -> batch+extract -> dedup -> metrics. Each stage's
/// artifact is written before the next stage starts; stages whose artifact
/// already exists in the output directory are loaded instead of recomputed.
/// Throws Error(stage_failure) wrapping the failing stage's error.
RunArtifacts run_pipeline(const PipelineConfig& config, LlmGateway& gateway, Embedder& embedder);

/// Reads whatever artifacts exist in `run_dir`.
RunArtifacts load_run_artifacts(const std::filesystem::path& run_dir);

/// Reads topics (JSON array) and a corpus (JSON array of strings or of
/// objects with id/record_id and text/enriched_text, or plain text with one
/// document per line, blank lines skipped, ids are line numbers) and scores
/// them.
MetricsReport run_eval_only(const std::filesystem::path& topics_file, const std::filesystem::path& corpus_file,
                            const MetricsConfig& config, Embedder& embedder, const StopwordSet& stopwords);

std::vector<std::pair<std::string, std::string>> load_corpus_file(const std::filesystem::path& corpus_file);

/// Markdown: topics (name, description, profile, words), metric table, cost.
std::string render_report(const RunArtifacts& artifacts);

}  // namespace maltopic
