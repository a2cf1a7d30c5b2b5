#pragma once

#include "maltopic/embedding.hpp"
#include "maltopic/error.hpp"
#include "maltopic/text.hpp"
#include "maltopic/topic.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace maltopic {

struct CorpusDocument {
  std::string doc_id;
  std::string normalized_text;  // stopwords retained
  std::vector<std::string> tokens;  // stopwords removed
};

struct TokenizedCorpus {
  std::vector<CorpusDocument> documents;
  std::map<std::string, std::size_t, std::less<>> token_doc_frequency;

  [[nodiscard]] std::size_t size() const noexcept { return documents.size(); }
};

TokenizedCorpus normalize_and_tokenize(const std::vector<std::pair<std::string, std::string>>& raw_texts,
                                       const StopwordSet& stopwords);

/// True iff the normalized phrase occurs in the document's normalized text
/// on token boundaries ("job" does not match "jobs").
bool phrase_occurs(std::string_view phrase, const CorpusDocument& document);

struct CoherenceConfig {
  double smoothing_epsilon = 1e-12;
};

struct CoverageConfig {
  double theta = 0.1;
};

struct TopicCoherence {
  std::string topic_name;
  double score = 0.0;
  /// Fewer than two representative words; score forced to 0.
  bool degenerate = false;
};

struct CoherenceResult {
  double overall = 0.0;
  std::vector<TopicCoherence> per_topic;
};

/// Smoothed natural-log PMI over document co-occurrence.
double pmi(std::string_view first, std::string_view second, const TokenizedCorpus& corpus,
           const CoherenceConfig& config = {});

/// Per topic: mean PMI over every unordered pair of representative words.
/// Overall: mean over topics, degenerate topics contributing 0.
CoherenceResult coherence(const std::vector<Topic>& topics, const TokenizedCorpus& corpus,
                          const CoherenceConfig& config = {});

/// |unique words (case-insensitive)| / total words. Throws Error(no_words).
double diversity(const std::vector<Topic>& topics);

/// Cosine similarity of two dense vectors of any scalar type.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorKind::dimension_mismatch,
                "cosine of vectors with " + std::to_string(u.size()) + " and " + std::to_string(v.size()) +
                    " components");
  }
  const auto nu = u.norm();
  const auto nv = v.norm();
  if (nu == 0 || nv == 0) throw Error(ErrorKind::zero_vector, "cosine with a zero-norm vector");
  return u.dot(v) / (nu * nv);
}

/// Mean of cos(v_i, v_j) over ordered pairs i != j of topic embeddings.
/// Throws Error(too_few_topics) for n < 2.
double avg_topic_similarity(const std::vector<Topic>& topics, Embedder& embedder);

/// Same quantity from precomputed embeddings, one per column.
double avg_pairwise_cosine(const Eigen::MatrixXd& embeddings);

struct CoverageResult {
  double fraction = 0.0;
  std::vector<std::string> covered_doc_ids;
  /// s(d) per document, corpus order.
  std::vector<double> best_similarity;
};

/// s(d) = max over topics of cos(embed(d), embed(topic)); a document whose
/// embedding is zero scores 0.
CoverageResult coverage(const TokenizedCorpus& docs, const std::vector<Topic>& topics, Embedder& embedder,
                        const CoverageConfig& config = {});

struct MetricsConfig {
  CoherenceConfig coherence;
  CoverageConfig coverage;
};

struct MetricsReport {
  double coherence = 0.0;
  double diversity = 0.0;
  /// Absent when there are fewer than two topics.
  std::optional<double> avg_similarity;
  double coverage = 0.0;
  std::vector<TopicCoherence> per_topic_coherence;
  std::vector<std::string> covered_doc_ids;
  std::vector<std::string> flags;
  std::size_t topic_count = 0;
  std::size_t document_count = 0;
  double theta = 0.1;
};

/// Throws Error(empty_topics) or Error(empty_corpus).
MetricsReport evaluate(const std::vector<Topic>& topics, const TokenizedCorpus& corpus, Embedder& embedder,
                       const MetricsConfig& config = {});

}  // namespace maltopic
