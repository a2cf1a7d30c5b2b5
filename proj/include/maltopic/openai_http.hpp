#pragma once

#include "maltopic/embedding.hpp"
#include "maltopic/llm.hpp"

#include <chrono>
#include <mutex>
#include <string>

namespace maltopic {

struct HttpEndpoint {
  /// e.g. "https://api.openai.com/v1"; the path part prefixes every route.
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::chrono::seconds timeout{120};
};

/// Reads the key from `env_var`; empty string when unset.
std::string api_key_from_env(const std::string& env_var = "MALTOPIC_API_KEY");

/// OpenAI-compatible POST {base}/chat/completions with a single user message.
class OpenAiChatBackend : public ChatBackend {
 public:
  explicit OpenAiChatBackend(HttpEndpoint endpoint);
  BackendReply send(const std::string& prompt, const GenerationParams& params) override;

 private:
  HttpEndpoint endpoint_;
};

/// OpenAI-compatible POST {base}/embeddings.
class OpenAiEmbedder : public Embedder {
 public:
  OpenAiEmbedder(HttpEndpoint endpoint, std::string model);
  Embedding embed(std::string_view text) override;

 private:
  HttpEndpoint endpoint_;
  std::string model_;
  std::mutex mutex_;
  Eigen::Index dimension_ = 0;
};

}  // namespace maltopic
