#include "maltopic/baseline.hpp"

#include "maltopic/serialize.hpp"

#include <algorithm>

namespace maltopic {

ConcatenatedDocument concatenate_record(const SurveyRecord& record, const std::vector<FieldSchema>& schema) {
  ConcatenatedDocument doc{record.record_id, {}};
  for (const auto& field : schema) {
    const auto& value = record.value(field.name);
    if (is_blank(value)) continue;
    if (!doc.text.empty()) doc.text.push_back(' ');
    doc.text += value;
  }
  return doc;
}

std::vector<ConcatenatedDocument> preprocess_for_baseline(const std::vector<ConcatenatedDocument>& docs,
                                                          const StopwordSet& stopwords) {
  std::vector<ConcatenatedDocument> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    ConcatenatedDocument cleaned{doc.record_id, {}};
    for (const auto& token : split_whitespace(normalize_text(doc.text))) {
      if (stopwords.contains(token)) continue;
      if (!cleaned.text.empty()) cleaned.text.push_back(' ');
      cleaned.text += token;
    }
    out.push_back(std::move(cleaned));
  }
  return out;
}

void write_baseline_corpus(const std::vector<ConcatenatedDocument>& docs, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string lines;
  json mapping = json::array();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::string line = docs[i].text;
    std::replace_if(line.begin(), line.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
    lines += line + "\n";
    mapping.push_back({{"line", i + 1}, {"record_id", docs[i].record_id}});
  }
  const json sidecar = {
      {"documents", docs.size()},
      {"lines", mapping},
      {"preprocessing",
       {{"concatenation", "non-empty field values in schema order, space separated"},
        {"lowercased", true},
        {"punctuation_removed", true},
        {"whitespace_collapsed", true},
        {"stopwords_removed", true},
        {"lemmatized", false}}},
  };
  write_file_atomic(out_dir / "corpus.txt", lines);
  write_file_atomic(out_dir / "corpus.json", dump(sidecar));
}

}  // namespace maltopic
