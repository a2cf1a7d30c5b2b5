#pragma once

#include "maltopic/survey.hpp"
#include "maltopic/text.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace maltopic {

struct ConcatenatedDocument {
  RecordId record_id;
  std::string text;
};

/// Non-empty field values in schema order, space-separated.
ConcatenatedDocument concatenate_record(const SurveyRecord& record, const std::vector<FieldSchema>& schema);

/// normalize_text followed by stopword removal. No lemmatization.
std::vector<ConcatenatedDocument> preprocess_for_baseline(const std::vector<ConcatenatedDocument>& docs,
                                                          const StopwordSet& stopwords);

/// Writes <out>/corpus.txt (one document per line) and <out>/corpus.json
/// (line number -> record id, plus preprocessing metadata).
void write_baseline_corpus(const std::vector<ConcatenatedDocument>& docs, const std::filesystem::path& out_dir);

}  // namespace maltopic
