#include "maltopic/text.hpp"

#include "maltopic/error.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

namespace maltopic {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io_failure: return "io-failure";
    case ErrorKind::missing_column: return "missing-column";
    case ErrorKind::malformed_row: return "malformed-row";
    case ErrorKind::duplicate_id: return "duplicate-id";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::unknown_field: return "unknown-field";
    case ErrorKind::over_budget: return "over-budget";
    case ErrorKind::transport_failure: return "transport-failure";
    case ErrorKind::provider_error: return "provider-error";
    case ErrorKind::cache_io_failure: return "cache-io-failure";
    case ErrorKind::unsplittable_response: return "unsplittable-response";
    case ErrorKind::unparseable_output: return "unparseable-output";
    case ErrorKind::invalid_topic: return "invalid-topic";
    case ErrorKind::unparseable_after_retry: return "unparseable-after-retry";
    case ErrorKind::empty_corpus: return "empty-corpus";
    case ErrorKind::no_words: return "no-words";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::zero_vector: return "zero-vector";
    case ErrorKind::too_few_topics: return "too-few-topics";
    case ErrorKind::empty_topics: return "empty-topics";
    case ErrorKind::enrichment_failed: return "enrichment-failed";
    case ErrorKind::stage_failure: return "stage-failure";
    case ErrorKind::config_error: return "config-error";
  }
  return "unknown";
}

namespace {

bool is_space(unsigned char c) noexcept { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && (is_space(c) || std::ispunct(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string normalize_key(std::string_view text) {
  std::string out;
  for (const auto& word : split_whitespace(to_lower(text))) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

bool is_blank(std::string_view text) noexcept {
  for (const char c : text) {
    if (!is_space(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = {
      "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are", "as", "at",
      "be", "because", "been", "before", "being", "below", "between", "both", "but", "by", "can", "could",
      "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from", "further", "had", "has",
      "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if",
      "in", "into", "is", "it", "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor",
      "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out",
      "over", "own", "same", "she", "should", "so", "some", "such", "than", "that", "the", "their",
      "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those", "through", "to",
      "too", "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which", "while",
      "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself", "yourselves",
      "s", "t", "d", "ll", "m", "re", "ve", "also", "may", "might", "must", "shall", "us"};
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  StopwordSet words;
  for (std::string line; std::getline(in, line);) {
    const auto word = trim(line);
    if (word.empty() || word.front() == '#') continue;
    words.insert(to_lower(word));
  }
  return words;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io_failure, "cannot read " + path.string());
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  static std::atomic<unsigned long> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(tid) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_failure, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::io_failure, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::io_failure, "cannot rename into " + path.string());
  }
}

}  // namespace maltopic
