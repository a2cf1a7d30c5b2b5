// maltopic: multi-agent topic modeling for survey data.
//
//   maltopic run --config cfg.json [--input data.csv] [--out dir]
//   maltopic eval --topics topics.json --corpus corpus.json --out dir
//   maltopic report --run dir
//   maltopic prep-baseline --input data.csv --out dir
//
// Exit codes: 0 success, 1 usage or configuration error, 2 stage failure.

#include "maltopic/baseline.hpp"
#include "maltopic/error.hpp"
#include "maltopic/mock_backend.hpp"
#include "maltopic/openai_http.hpp"
#include "maltopic/pipeline.hpp"
#include "maltopic/serialize.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace maltopic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitStage = 2;

bool is_usage_error(ErrorKind kind) {
  return kind == ErrorKind::config_error || kind == ErrorKind::invalid_argument || kind == ErrorKind::invalid_spec;
}

std::string require_key(const std::string& env_var) {
  auto key = api_key_from_env(env_var);
  if (key.empty()) throw Error(ErrorKind::config_error, "environment variable " + env_var + " is not set");
  return key;
}

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config) {
  if (config.kind == "mock") return std::make_shared<MockBackend>();
  return std::make_shared<OpenAiChatBackend>(HttpEndpoint{config.base_url, require_key(config.api_key_env)});
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
  if (config.kind == "hashing") return std::make_unique<HashingEmbedder>(config.dimension);
  if (config.kind == "openai") {
    return std::make_unique<OpenAiEmbedder>(HttpEndpoint{config.base_url, require_key(config.api_key_env)}, config.model);
  }
  throw Error(ErrorKind::config_error, "unknown embedder kind '" + config.kind + "'");
}

void print_metrics(const MetricsReport& m) {
  std::cout << "coherence      " << m.coherence << "\n"
            << "diversity      " << m.diversity << "\n"
            << "avg_similarity " << (m.avg_similarity ? std::to_string(*m.avg_similarity) : std::string("n/a")) << "\n"
            << "coverage       " << m.coverage << "\n";
  for (const auto& f : m.flags) std::cout << "flag: " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent LLM topic modeling for survey data"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Enrich, extract, deduplicate and score topics");
  std::string run_config;
  std::string run_input;
  std::string run_out;
  std::string run_cache;
  std::string run_corpus;
  run->add_option("--config", run_config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--input", run_input, "Survey file (overrides config)");
  run->add_option("--out", run_out, "Output directory (overrides config)");
  run->add_option("--cache-dir", run_cache, "LLM response cache (overrides config)");
  run->add_option("--corpus", run_corpus, "Metric corpus: enriched or original")
      ->check(CLI::IsMember({"enriched", "original"}));

  auto* eval = app.add_subcommand("eval", "Score an existing topic set against a corpus");
  std::string eval_topics;
  std::string eval_corpus;
  std::string eval_out;
  std::string eval_stopwords;
  EmbedderConfig eval_embedder;
  MetricsConfig eval_metrics;
  eval->add_option("--topics", eval_topics, "Topics JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--corpus", eval_corpus, "Corpus: JSON array or one document per line")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Directory for metrics.json")->required();
  eval->add_option("--theta", eval_metrics.coverage.theta, "Coverage threshold")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--epsilon", eval_metrics.coherence.smoothing_epsilon, "PMI smoothing");
  eval->add_option("--stopwords", eval_stopwords, "Stopword file")->check(CLI::ExistingFile);
  eval->add_option("--embedder", eval_embedder.kind, "hashing or openai")->check(CLI::IsMember({"hashing", "openai"}));
  eval->add_option("--embedding-model", eval_embedder.model, "Model for the openai embedder");
  eval->add_option("--dimension", eval_embedder.dimension, "Hashing embedder dimension");
  eval->add_option("--base-url", eval_embedder.base_url, "Embeddings endpoint base URL");

  auto* report = app.add_subcommand("report", "Render the Markdown report of a run");
  std::string report_run;
  std::string report_output;
  report->add_option("--run", report_run, "Run directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--output", report_output, "Write to this file instead of stdout");

  auto* prep = app.add_subcommand("prep-baseline", "Concatenate and clean records for external baselines");
  std::string prep_input;
  std::string prep_out;
  std::string prep_config;
  std::string prep_stopwords;
  char prep_delimiter = ',';
  prep->add_option("--input", prep_input, "Survey file")->required()->check(CLI::ExistingFile);
  prep->add_option("--out", prep_out, "Output directory")->required();
  prep->add_option("--config", prep_config, "Pipeline config supplying the schema")->check(CLI::ExistingFile);
  prep->add_option("--stopwords", prep_stopwords, "Stopword file")->check(CLI::ExistingFile);
  prep->add_option("--delimiter", prep_delimiter, "Field delimiter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) {
      auto config = load_pipeline_config(run_config);
      if (!run_input.empty()) config.input = run_input;
      if (!run_out.empty()) config.output_dir = run_out;
      if (!run_cache.empty()) config.cache_dir = run_cache;
      if (!run_corpus.empty()) config.corpus = run_corpus == "original" ? CorpusChoice::original : CorpusChoice::enriched;
      config.validate();
      LlmGateway gateway(make_backend(config.backend), gateway_options(config));
      auto embedder = make_embedder(config.embedder);
      const auto artifacts = run_pipeline(config, gateway, *embedder);
      for (const auto& w : artifacts.manifest.value("warnings", json::array())) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
      }
      std::cout << "wrote " << config.output_dir.string() << " ("
                << (artifacts.dedup ? artifacts.dedup->topics.size() : 0) << " topics, USD "
                << artifacts.cost.total_usd << ")\n";
    } else if (*eval) {
      auto embedder = make_embedder(eval_embedder);
      const auto stopwords = eval_stopwords.empty() ? default_stopwords() : load_stopwords(eval_stopwords);
      const auto metrics = run_eval_only(eval_topics, eval_corpus, eval_metrics, *embedder, stopwords);
      std::filesystem::create_directories(eval_out);
      write_file_atomic(std::filesystem::path(eval_out) / artifact::metrics, dump(json(metrics)));
      print_metrics(metrics);
    } else if (*report) {
      const auto text = render_report(load_run_artifacts(report_run));
      if (report_output.empty()) {
        std::cout << text;
      } else {
        write_file_atomic(report_output, text);
      }
    } else if (*prep) {
      CsvOptions csv;
      csv.delimiter = prep_delimiter;
      std::vector<FieldSchema> schema;
      if (!prep_config.empty()) {
        const auto config = load_pipeline_config(prep_config);
        schema = config.schema;
        csv = config.csv;
      } else {
        for (const auto& column : read_header(prep_input, csv)) {
          if (column != csv.id_column) schema.push_back({column, FieldKind::structured, std::nullopt});
        }
      }
      const auto dataset = load_dataset(prep_input, schema, csv);
      std::vector<ConcatenatedDocument> docs;
      for (const auto& record : dataset.records) docs.push_back(concatenate_record(record, dataset.schema));
      const auto stopwords = prep_stopwords.empty() ? default_stopwords() : load_stopwords(prep_stopwords);
      write_baseline_corpus(preprocess_for_baseline(docs, stopwords), prep_out);
      std::cout << "wrote " << docs.size() << " documents to " << prep_out << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_usage_error(e.kind()) ? kExitUsage : kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return kExitOk;
}
