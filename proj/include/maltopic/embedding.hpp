#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace maltopic {

using Embedding = Eigen::VectorXd;

/// Text in, fixed-dimension vector out. Implementations must be thread-safe.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Embedding embed(std::string_view text) = 0;
};

/// Bag-of-words term counts hashed (FNV-1a) into `dimension` buckets over the
/// normalized tokens of the text. Identical texts give identical vectors.
class HashingEmbedder : public Embedder {
 public:
  explicit HashingEmbedder(Eigen::Index dimension = 256);
  Embedding embed(std::string_view text) override;

  [[nodiscard]] Eigen::Index dimension() const noexcept { return dimension_; }
  [[nodiscard]] Eigen::Index bucket(std::string_view token) const noexcept;

 private:
  Eigen::Index dimension_;
};

}  // namespace maltopic
