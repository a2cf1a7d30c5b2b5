#include "maltopic/pipeline.hpp"

#include "maltopic/error.hpp"
#include "maltopic/serialize.hpp"
#include "maltopic/text.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace maltopic {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

class RunLock {
 public:
  explicit RunLock(std::filesystem::path path) : path_(std::move(path)) {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      throw Error(ErrorKind::stage_failure, "output directory is in use (remove " + path_.string() +
                                                " if no other run is active)");
    }
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;
  ~RunLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

 private:
  std::filesystem::path path_;
};

template <typename T>
T load_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path)).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io_failure, path.string() + ": " + e.what());
  }
}

void save_json_file(const std::filesystem::path& path, const json& value) { write_file_atomic(path, dump(value)); }

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(ErrorKind::stage_failure, std::string(stage) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::stage_failure, std::string(stage) + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

const std::vector<Topic>& final_topics(const RunArtifacts& a) {
  static const std::vector<Topic> none;
  return a.dedup ? a.dedup->topics : none;
}

}  // namespace

void PipelineConfig::validate() const {
  try {
    if (schema.empty()) throw Error(ErrorKind::config_error, "schema is empty");
    enrichment.validate(schema);
    generation.validate();
    budget.validate();
    cost.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config_error) throw;
    throw Error(ErrorKind::config_error, e.what());
  }
  if (!(metrics.coverage.theta >= 0.0 && metrics.coverage.theta <= 1.0)) {
    throw Error(ErrorKind::config_error, "coverage theta must lie in [0, 1]");
  }
  if (!(metrics.coherence.smoothing_epsilon > 0.0)) {
    throw Error(ErrorKind::config_error, "smoothing_epsilon must be positive");
  }
  if (parallelism == 0) throw Error(ErrorKind::config_error, "parallelism must be at least 1");
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0)) {
    throw Error(ErrorKind::config_error, "max_failure_fraction must lie in [0, 1]");
  }
  if (output_dir.empty()) throw Error(ErrorKind::config_error, "output directory not set");
  if (backend.kind != "mock" && backend.kind != "openai") {
    throw Error(ErrorKind::config_error, "unknown backend kind '" + backend.kind + "'");
  }
  if (embedder.kind != "hashing" && embedder.kind != "openai") {
    throw Error(ErrorKind::config_error, "unknown embedder kind '" + embedder.kind + "'");
  }
}

PipelineConfig pipeline_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  try {
    if (j.contains("input")) c.input = resolve(base_dir, j.at("input").get<std::string>());
    j.at("schema").get_to(c.schema);
    if (j.contains("delimiter")) {
      const auto d = j.at("delimiter").get<std::string>();
      if (d.size() != 1) throw Error(ErrorKind::config_error, "delimiter must be one character");
      c.csv.delimiter = d.front();
    }
    if (j.contains("id_column")) j.at("id_column").get_to(c.csv.id_column);
    j.at("enrichment").get_to(c.enrichment);
    if (j.contains("generation")) j.at("generation").get_to(c.generation);
    if (j.contains("budget")) j.at("budget").get_to(c.budget);
    if (j.contains("cost")) j.at("cost").get_to(c.cost);
    if (j.contains("coherence")) c.metrics.coherence.smoothing_epsilon = j.at("coherence").value("smoothing_epsilon", 1e-12);
    if (j.contains("coverage")) c.metrics.coverage.theta = j.at("coverage").value("theta", 0.1);
    if (j.contains("cache_dir") && !j.at("cache_dir").is_null()) {
      c.cache_dir = resolve(base_dir, j.at("cache_dir").get<std::string>());
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    c.parallelism = j.value("parallelism", std::size_t{4});
    const auto corpus = j.value("corpus", std::string("enriched"));
    if (corpus == "enriched") {
      c.corpus = CorpusChoice::enriched;
    } else if (corpus == "original") {
      c.corpus = CorpusChoice::original;
    } else {
      throw Error(ErrorKind::config_error, "corpus must be 'enriched' or 'original'");
    }
    c.max_failure_fraction = j.value("max_failure_fraction", 0.0);
    if (j.contains("stopwords_file") && !j.at("stopwords_file").is_null()) {
      c.stopwords_file = resolve(base_dir, j.at("stopwords_file").get<std::string>());
    }
    if (j.contains("backend")) {
      const auto& b = j.at("backend");
      c.backend.kind = b.value("kind", c.backend.kind);
      c.backend.base_url = b.value("base_url", c.backend.base_url);
      c.backend.api_key_env = b.value("api_key_env", c.backend.api_key_env);
    }
    if (j.contains("embedder")) {
      const auto& e = j.at("embedder");
      c.embedder.kind = e.value("kind", c.embedder.kind);
      c.embedder.model = e.value("model", c.embedder.model);
      c.embedder.dimension = e.value("dimension", c.embedder.dimension);
      c.embedder.base_url = e.value("base_url", c.embedder.base_url);
      c.embedder.api_key_env = e.value("api_key_env", c.embedder.api_key_env);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, e.what());
  }
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::config_error, e.what());
  }
  return pipeline_config_from_json(j, path.parent_path());
}

json to_json(const PipelineConfig& c) {
  json j = {
      {"input", c.input.string()},
      {"schema", c.schema},
      {"delimiter", std::string(1, c.csv.delimiter)},
      {"id_column", c.csv.id_column},
      {"enrichment", c.enrichment},
      {"generation", c.generation},
      {"budget", c.budget},
      {"cost", c.cost},
      {"coherence", {{"smoothing_epsilon", c.metrics.coherence.smoothing_epsilon}}},
      {"coverage", {{"theta", c.metrics.coverage.theta}}},
      {"cache_dir", c.cache_dir ? json(c.cache_dir->string()) : json(nullptr)},
      {"output_dir", c.output_dir.string()},
      {"parallelism", c.parallelism},
      {"corpus", c.corpus == CorpusChoice::enriched ? "enriched" : "original"},
      {"max_failure_fraction", c.max_failure_fraction},
      {"stopwords_file", c.stopwords_file ? json(c.stopwords_file->string()) : json(nullptr)},
      {"backend", {{"kind", c.backend.kind}, {"base_url", c.backend.base_url}, {"api_key_env", c.backend.api_key_env}}},
      {"embedder",
       {{"kind", c.embedder.kind},
        {"model", c.embedder.model},
        {"dimension", c.embedder.dimension},
        {"base_url", c.embedder.base_url},
        {"api_key_env", c.embedder.api_key_env}}},
  };
  return j;
}

GatewayOptions gateway_options(const PipelineConfig& config) {
  GatewayOptions options;
  options.budget = config.budget;
  options.cost = config.cost;
  options.cache_dir = config.cache_dir;
  return options;
}

CostSummary summarize_cost(const std::vector<const std::vector<ChatExchange>*>& groups) {
  CostSummary s;
  for (const auto* group : groups) {
    for (const auto& e : *group) {
      ++s.exchanges;
      if (e.cached) ++s.cached_exchanges;
      s.input_tokens += e.input_tokens;
      s.output_tokens += e.output_tokens;
      s.total_usd += e.cost_usd;
    }
  }
  return s;
}

namespace {

json cost_json(const CostSummary& s) {
  return {{"exchanges", s.exchanges},
          {"cached_exchanges", s.cached_exchanges},
          {"input_tokens", s.input_tokens},
          {"output_tokens", s.output_tokens},
          {"total_usd", s.total_usd}};
}

CostSummary cost_from_json(const json& j) {
  CostSummary s;
  s.exchanges = j.value("exchanges", std::int64_t{0});
  s.cached_exchanges = j.value("cached_exchanges", std::int64_t{0});
  s.input_tokens = j.value("input_tokens", std::int64_t{0});
  s.output_tokens = j.value("output_tokens", std::int64_t{0});
  s.total_usd = j.value("total_usd", 0.0);
  return s;
}

std::vector<const std::vector<ChatExchange>*> exchange_groups(const RunArtifacts& a) {
  std::vector<const std::vector<ChatExchange>*> groups{&a.enrichment_exchanges};
  for (const auto& b : a.batches) groups.push_back(&b.exchanges);
  if (a.dedup) groups.push_back(&a.dedup->exchanges);
  return groups;
}

}  // namespace

RunArtifacts run_pipeline(const PipelineConfig& config, LlmGateway& gateway, Embedder& embedder) {
  config.validate();
  const auto& out = config.output_dir;
  std::filesystem::create_directories(out);
  RunLock lock(out / artifact::lock);

  const auto started = utc_timestamp();
  const auto live_before = gateway.totals().live_calls;
  json stages = json::object();
  std::vector<std::string> warnings;
  auto exists = [&](const char* name) { return std::filesystem::exists(out / name); };

  RunArtifacts a;
  a.target_field = config.enrichment.target_field;

  const auto dataset = run_stage("ingest", [&] {
    auto d = load_dataset(config.input, config.schema, config.csv);
    if (const auto issues = validate_dataset(d); !issues.empty()) {
      throw Error(ErrorKind::malformed_row, issues.front().message);
    }
    return d;
  });
  stages["ingest"] = {{"status", "computed"}, {"records", dataset.size()}};
  if (dataset.records.empty()) warnings.emplace_back("dataset has no records");

  if (exists(artifact::enriched)) {
    a.enriched = load_json_file<std::vector<EnrichedResponse>>(out / artifact::enriched);
    if (exists(artifact::enrichment_exchanges)) {
      a.enrichment_exchanges = load_json_file<std::vector<ChatExchange>>(out / artifact::enrichment_exchanges);
    }
    stages["enrich"] = {{"status", "resumed"}};
  } else {
    auto run = run_stage("enrich", [&] {
      return enrich_dataset(dataset, config.enrichment, gateway, config.generation,
                            {config.parallelism, config.max_failure_fraction});
    });
    for (const auto& f : run.failures) warnings.push_back("enrichment failed for " + f);
    a.enriched = std::move(run.responses);
    a.enrichment_exchanges = std::move(run.exchanges);
    save_json_file(out / artifact::enrichment_exchanges, a.enrichment_exchanges);
    save_json_file(out / artifact::enriched, a.enriched);
    stages["enrich"] = {{"status", "computed"}};
  }

  if (exists(artifact::batches)) {
    a.batches = load_json_file<std::vector<TopicBatchResult>>(out / artifact::batches);
    stages["topics"] = {{"status", "resumed"}};
  } else {
    a.batches = run_stage("topics", [&] {
      return model_topics(a.enriched, gateway, config.generation, {config.parallelism});
    });
    save_json_file(out / artifact::batches, a.batches);
    stages["topics"] = {{"status", "computed"}};
  }

  if (exists(artifact::dedup)) {
    a.dedup = load_json_file<DedupResult>(out / artifact::dedup);
    stages["dedup"] = {{"status", "resumed"}};
  } else {
    a.dedup = run_stage("dedup", [&] { return dedup_llm(a.batches, gateway, config.generation); });
    if (!a.dedup->fallback_reason.empty()) warnings.push_back("dedup fell back: " + a.dedup->fallback_reason);
    save_json_file(out / artifact::dedup, *a.dedup);
    stages["dedup"] = {{"status", "computed"}};
  }

  if (exists(artifact::metrics)) {
    const json m = json::parse(read_file(out / artifact::metrics));
    if (!m.is_null()) a.metrics = m.get<MetricsReport>();
    stages["metrics"] = {{"status", "resumed"}};
  } else {
    a.metrics = run_stage("metrics", [&]() -> std::optional<MetricsReport> {
      std::vector<std::pair<std::string, std::string>> texts;
      for (const auto& r : a.enriched) {
        if (r.excluded) continue;
        texts.emplace_back(r.record_id, config.corpus == CorpusChoice::enriched ? r.enriched_text : r.original_text);
      }
      if (final_topics(a).empty() || texts.empty()) return std::nullopt;
      const auto stopwords = config.stopwords_file ? load_stopwords(*config.stopwords_file) : default_stopwords();
      return evaluate(final_topics(a), normalize_and_tokenize(texts, stopwords), embedder, config.metrics);
    });
    if (!a.metrics) warnings.emplace_back("metrics skipped: no topics or no documents");
    save_json_file(out / artifact::metrics, a.metrics ? json(*a.metrics) : json(nullptr));
    stages["metrics"] = {{"status", "computed"}};
  }

  a.cost = summarize_cost(exchange_groups(a));
  save_json_file(out / artifact::cost, cost_json(a.cost));

  a.manifest = {
      {"tool", "maltopic"},
      {"version", kVersion},
      {"config", to_json(config)},
      {"started_at", started},
      {"finished_at", utc_timestamp()},
      {"stages", stages},
      {"warnings", warnings},
      {"live_calls_this_run", gateway.totals().live_calls - live_before},
      {"cost", cost_json(a.cost)},
  };
  save_json_file(out / artifact::manifest, a.manifest);
  write_file_atomic(out / artifact::report, render_report(a));
  return a;
}

RunArtifacts load_run_artifacts(const std::filesystem::path& run_dir) {
  if (!std::filesystem::is_directory(run_dir)) throw Error(ErrorKind::io_failure, run_dir.string() + " is not a directory");
  RunArtifacts a;
  auto path = [&](const char* name) { return run_dir / name; };
  if (std::filesystem::exists(path(artifact::manifest))) {
    a.manifest = json::parse(read_file(path(artifact::manifest)));
    if (a.manifest.contains("config")) {
      a.target_field = a.manifest["config"]["enrichment"].value("target_field", std::string{});
    }
  }
  if (std::filesystem::exists(path(artifact::enriched))) {
    a.enriched = load_json_file<std::vector<EnrichedResponse>>(path(artifact::enriched));
  }
  if (std::filesystem::exists(path(artifact::enrichment_exchanges))) {
    a.enrichment_exchanges = load_json_file<std::vector<ChatExchange>>(path(artifact::enrichment_exchanges));
  }
  if (std::filesystem::exists(path(artifact::batches))) {
    a.batches = load_json_file<std::vector<TopicBatchResult>>(path(artifact::batches));
  }
  if (std::filesystem::exists(path(artifact::dedup))) a.dedup = load_json_file<DedupResult>(path(artifact::dedup));
  if (std::filesystem::exists(path(artifact::metrics))) {
    const json m = json::parse(read_file(path(artifact::metrics)));
    if (!m.is_null()) a.metrics = m.get<MetricsReport>();
  }
  if (std::filesystem::exists(path(artifact::cost))) {
    a.cost = cost_from_json(json::parse(read_file(path(artifact::cost))));
  } else {
    a.cost = summarize_cost(exchange_groups(a));
  }
  return a;
}

std::vector<std::pair<std::string, std::string>> load_corpus_file(const std::filesystem::path& corpus_file) {
  const auto contents = read_file(corpus_file);
  const auto first = contents.find_first_not_of(" \t\r\n");
  std::vector<std::pair<std::string, std::string>> docs;
  if (first != std::string::npos && contents[first] == '[') {
    json parsed;
    try {
      parsed = json::parse(contents);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::unparseable_output, corpus_file.string() + ": " + e.what());
    }
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      const auto& entry = parsed[i];
      if (entry.is_string()) {
        docs.emplace_back(std::to_string(i), entry.get<std::string>());
        continue;
      }
      if (!entry.is_object()) {
        throw Error(ErrorKind::unparseable_output, corpus_file.string() + ": entry " + std::to_string(i) +
                                                       " is neither a string nor an object");
      }
      if (entry.value("excluded", false)) continue;
      std::string id = std::to_string(i);
      for (const char* key : {"record_id", "id", "doc_id"}) {
        if (entry.contains(key)) {
          id = entry.at(key).is_string() ? entry.at(key).get<std::string>() : entry.at(key).dump();
          break;
        }
      }
      const char* text_key = nullptr;
      for (const char* key : {"enriched_text", "text", "original_text"}) {
        if (entry.contains(key) && entry.at(key).is_string()) {
          text_key = key;
          break;
        }
      }
      if (!text_key) {
        throw Error(ErrorKind::unparseable_output,
                    corpus_file.string() + ": entry " + std::to_string(i) + " has no text field");
      }
      docs.emplace_back(id, entry.at(text_key).get<std::string>());
    }
    return docs;
  }
  std::istringstream in(contents);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    docs.emplace_back(std::to_string(line_no), line);
  }
  return docs;
}

MetricsReport run_eval_only(const std::filesystem::path& topics_file, const std::filesystem::path& corpus_file,
                            const MetricsConfig& config, Embedder& embedder, const StopwordSet& stopwords) {
  const auto topics = parse_topic_file(read_file(topics_file));
  if (topics.empty()) throw Error(ErrorKind::empty_topics, topics_file.string() + " holds no topics");
  const auto docs = load_corpus_file(corpus_file);
  if (docs.empty()) throw Error(ErrorKind::empty_corpus, corpus_file.string() + " holds no documents");
  return evaluate(topics, normalize_and_tokenize(docs, stopwords), embedder, config);
}

}  // namespace maltopic
