#include "maltopic/embedding.hpp"

#include "maltopic/error.hpp"
#include "maltopic/text.hpp"

#include <cstdint>

namespace maltopic {

HashingEmbedder::HashingEmbedder(Eigen::Index dimension) : dimension_(dimension) {
  if (dimension_ <= 0) throw Error(ErrorKind::invalid_argument, "embedding dimension must be positive");
}

Eigen::Index HashingEmbedder::bucket(std::string_view token) const noexcept {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char c : token) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return static_cast<Eigen::Index>(hash % static_cast<std::uint64_t>(dimension_));
}

Embedding HashingEmbedder::embed(std::string_view text) {
  Embedding v = Embedding::Zero(dimension_);
  for (const auto& token : split_whitespace(normalize_text(text))) v[bucket(token)] += 1.0;
  return v;
}

}  // namespace maltopic
