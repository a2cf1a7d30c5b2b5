#include "maltopic/metrics.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace maltopic {

namespace {

std::vector<bool> occurrences(std::string_view phrase, const TokenizedCorpus& corpus) {
  std::vector<bool> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus.documents) out.push_back(phrase_occurs(phrase, doc));
  return out;
}

double smoothed_pmi(const std::vector<bool>& a, const std::vector<bool>& b, double epsilon) {
  std::size_t na = 0;
  std::size_t nb = 0;
  std::size_t nab = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    na += a[d];
    nb += b[d];
    nab += a[d] && b[d];
  }
  const auto total = static_cast<double>(a.size());
  const double pa = static_cast<double>(na) / total;
  const double pb = static_cast<double>(nb) / total;
  const double pab = static_cast<double>(nab) / total;
  return std::log((pab + epsilon) / ((pa + epsilon) * (pb + epsilon)));
}

void require_corpus(const TokenizedCorpus& corpus) {
  if (corpus.documents.empty()) throw Error(ErrorKind::empty_corpus, "corpus has no documents");
}

Eigen::MatrixXd embed_topics(const std::vector<Topic>& topics, Embedder& embedder) {
  Eigen::MatrixXd m;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    const Embedding v = embedder.embed(canonical_text(topics[i]));
    if (i == 0) m.resize(v.size(), static_cast<Eigen::Index>(topics.size()));
    if (v.size() != m.rows()) throw Error(ErrorKind::dimension_mismatch, "embedder changed dimension");
    m.col(static_cast<Eigen::Index>(i)) = v;
  }
  return m;
}

// Columns scaled to unit length.
Eigen::MatrixXd unit_columns(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double n = out.col(c).norm();
    if (n == 0.0) throw Error(ErrorKind::zero_vector, "embedding " + std::to_string(c) + " is all zeros");
    out.col(c) /= n;
  }
  return out;
}

}  // namespace

TokenizedCorpus normalize_and_tokenize(const std::vector<std::pair<std::string, std::string>>& raw_texts,
                                       const StopwordSet& stopwords) {
  TokenizedCorpus corpus;
  corpus.documents.reserve(raw_texts.size());
  for (const auto& [id, text] : raw_texts) {
    CorpusDocument doc;
    doc.doc_id = id;
    doc.normalized_text = normalize_text(text);
    std::set<std::string, std::less<>> seen;
    for (auto& token : split_whitespace(doc.normalized_text)) {
      if (stopwords.contains(token)) continue;
      if (seen.insert(token).second) ++corpus.token_doc_frequency[token];
      doc.tokens.push_back(std::move(token));
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

bool phrase_occurs(std::string_view phrase, const CorpusDocument& document) {
  const auto needle = normalize_text(phrase);
  if (needle.empty()) return false;
  const std::string padded = " " + document.normalized_text + " ";
  return padded.find(" " + needle + " ") != std::string::npos;
}

double pmi(std::string_view first, std::string_view second, const TokenizedCorpus& corpus,
           const CoherenceConfig& config) {
  require_corpus(corpus);
  return smoothed_pmi(occurrences(first, corpus), occurrences(second, corpus), config.smoothing_epsilon);
}

CoherenceResult coherence(const std::vector<Topic>& topics, const TokenizedCorpus& corpus,
                          const CoherenceConfig& config) {
  require_corpus(corpus);
  if (!(config.smoothing_epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "smoothing_epsilon must be positive");

  CoherenceResult result;
  double sum = 0.0;
  for (const auto& topic : topics) {
    TopicCoherence tc{topic.name, 0.0, topic.representative_words.size() < 2};
    if (!tc.degenerate) {
      std::vector<std::vector<bool>> occ;
      for (const auto& w : topic.representative_words) occ.push_back(occurrences(w, corpus));
      double pair_sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t i = 0; i < occ.size(); ++i) {
        for (std::size_t j = i + 1; j < occ.size(); ++j) {
          pair_sum += smoothed_pmi(occ[i], occ[j], config.smoothing_epsilon);
          ++pairs;
        }
      }
      tc.score = pair_sum / static_cast<double>(pairs);
    }
    sum += tc.score;
    result.per_topic.push_back(std::move(tc));
  }
  result.overall = topics.empty() ? 0.0 : sum / static_cast<double>(topics.size());
  return result;
}

double diversity(const std::vector<Topic>& topics) {
  std::set<std::string, std::less<>> unique;
  std::size_t total = 0;
  for (const auto& topic : topics) {
    for (const auto& w : topic.representative_words) {
      unique.insert(normalize_key(w));
      ++total;
    }
  }
  if (total == 0) throw Error(ErrorKind::no_words, "topics carry no representative words");
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

double avg_pairwise_cosine(const Eigen::MatrixXd& embeddings) {
  const auto n = embeddings.cols();
  if (n < 2) throw Error(ErrorKind::too_few_topics, "average similarity needs at least two topics");
  const Eigen::MatrixXd unit = unit_columns(embeddings);
  const Eigen::MatrixXd gram = unit.transpose() * unit;
  return (gram.sum() - gram.trace()) / static_cast<double>(n * (n - 1));
}

double avg_topic_similarity(const std::vector<Topic>& topics, Embedder& embedder) {
  if (topics.size() < 2) throw Error(ErrorKind::too_few_topics, "average similarity needs at least two topics");
  return avg_pairwise_cosine(embed_topics(topics, embedder));
}

CoverageResult coverage(const TokenizedCorpus& docs, const std::vector<Topic>& topics, Embedder& embedder,
                        const CoverageConfig& config) {
  require_corpus(docs);
  if (topics.empty()) throw Error(ErrorKind::empty_topics, "coverage needs at least one topic");
  if (!(config.theta >= 0.0 && config.theta <= 1.0)) throw Error(ErrorKind::invalid_argument, "theta must lie in [0, 1]");

  const Eigen::MatrixXd unit_topics = unit_columns(embed_topics(topics, embedder));
  CoverageResult result;
  std::size_t covered = 0;
  for (const auto& doc : docs.documents) {
    const Embedding d = embedder.embed(doc.normalized_text);
    if (d.size() != unit_topics.rows()) throw Error(ErrorKind::dimension_mismatch, "embedder changed dimension");
    const double norm = d.norm();
    const double best = norm == 0.0 ? 0.0 : (unit_topics.transpose() * (d / norm)).maxCoeff();
    result.best_similarity.push_back(best);
    if (best >= config.theta) {
      ++covered;
      result.covered_doc_ids.push_back(doc.doc_id);
    }
  }
  result.fraction = static_cast<double>(covered) / static_cast<double>(docs.size());
  return result;
}

MetricsReport evaluate(const std::vector<Topic>& topics, const TokenizedCorpus& corpus, Embedder& embedder,
                       const MetricsConfig& config) {
  if (topics.empty()) throw Error(ErrorKind::empty_topics, "no topics to evaluate");
  require_corpus(corpus);

  MetricsReport report;
  report.topic_count = topics.size();
  report.document_count = corpus.size();
  report.theta = config.coverage.theta;

  auto coh = coherence(topics, corpus, config.coherence);
  report.coherence = coh.overall;
  for (const auto& tc : coh.per_topic) {
    if (tc.degenerate) report.flags.push_back("degenerate-topic: '" + tc.topic_name + "' has fewer than two words");
  }
  report.per_topic_coherence = std::move(coh.per_topic);
  report.diversity = diversity(topics);
  if (topics.size() >= 2) {
    report.avg_similarity = avg_topic_similarity(topics, embedder);
  } else {
    report.flags.emplace_back("too-few-topics: average similarity needs at least two topics");
  }
  auto cov = coverage(corpus, topics, embedder, config.coverage);
  report.coverage = cov.fraction;
  report.covered_doc_ids = std::move(cov.covered_doc_ids);
  return report;
}

}  // namespace maltopic
