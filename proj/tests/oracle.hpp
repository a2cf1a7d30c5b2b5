#pragma once

// Brute-force reference computations for the metric tests. Nothing here
// calls into the library's text normalisation, phrase matching or embedding
// code; documents are re-tokenised and every count is taken by enumeration.

#include "maltopic/topic.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace maltopic::oracle {

inline std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

inline bool contains_sequence(const std::vector<std::string>& doc, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > doc.size()) return false;
  for (std::size_t start = 0; start + phrase.size() <= doc.size(); ++start) {
    bool all = true;
    for (std::size_t k = 0; k < phrase.size(); ++k) all = all && doc[start + k] == phrase[k];
    if (all) return true;
  }
  return false;
}

inline double pmi(const std::vector<std::string>& docs, const std::string& a, const std::string& b, double eps) {
  double ca = 0;
  double cb = 0;
  double cab = 0;
  for (const auto& d : docs) {
    const auto tokens = words(d);
    const bool ha = contains_sequence(tokens, words(a));
    const bool hb = contains_sequence(tokens, words(b));
    ca += ha ? 1 : 0;
    cb += hb ? 1 : 0;
    cab += (ha && hb) ? 1 : 0;
  }
  const double n = static_cast<double>(docs.size());
  return std::log((cab / n + eps) / ((ca / n + eps) * (cb / n + eps)));
}

inline double coherence(const std::vector<std::string>& docs, const std::vector<Topic>& topics, double eps) {
  double total = 0;
  for (const auto& t : topics) {
    const auto& w = t.representative_words;
    if (w.size() < 2) continue;
    double sum = 0;
    double pairs = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        sum += pmi(docs, w[i], w[j], eps);
        pairs += 1;
      }
    }
    total += sum / pairs;
  }
  return total / static_cast<double>(topics.size());
}

inline double bow_cosine(const std::string& x, const std::string& y) {
  std::map<std::string, double> cx;
  std::map<std::string, double> cy;
  for (const auto& w : words(x)) cx[w] += 1;
  for (const auto& w : words(y)) cy[w] += 1;
  double dot = 0;
  double nx = 0;
  double ny = 0;
  for (const auto& [w, c] : cx) {
    nx += c * c;
    if (const auto it = cy.find(w); it != cy.end()) dot += c * it->second;
  }
  for (const auto& [w, c] : cy) ny += c * c;
  if (nx == 0 || ny == 0) return 0.0;
  return dot / std::sqrt(nx * ny);
}

inline std::string topic_text(const Topic& t) {
  std::string s = t.name + " " + t.description;
  for (const auto& w : t.representative_words) s += " " + w;
  return s;
}

/// Best bag-of-words cosine to any topic, per document.
inline std::vector<double> best_similarity(const std::vector<std::string>& docs, const std::vector<Topic>& topics) {
  std::vector<double> out;
  for (const auto& d : docs) {
    double best = -2.0;
    for (const auto& t : topics) best = std::max(best, bow_cosine(d, topic_text(t)));
    out.push_back(best);
  }
  return out;
}

inline double coverage(const std::vector<std::string>& docs, const std::vector<Topic>& topics, double theta) {
  double covered = 0;
  for (const double s : best_similarity(docs, topics)) covered += s >= theta ? 1 : 0;
  return covered / static_cast<double>(docs.size());
}

}  // namespace maltopic::oracle
