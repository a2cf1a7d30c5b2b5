#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maltopic {

struct GenerationParams {
  std::string model_id = "gpt-4o-mini-2024-07-18";
  std::int64_t seed = 1234;
  double temperature = 0.2;
  double top_p = 0.9;
  std::int64_t max_output_tokens = 16000;

  /// Throws Error(invalid_argument) on out-of-range values.
  void validate() const;
};

struct TokenBudget {
  std::int64_t max_input_tokens = 128000;
  std::int64_t max_output_tokens = 16000;
  /// Fraction of max_input_tokens held back when packing batches.
  double safety_margin = 0.1;

  void validate() const;
  /// floor(max_input_tokens * (1 - safety_margin))
  [[nodiscard]] std::int64_t effective_input_tokens() const;
};

struct CostModel {
  double input_usd_per_million_tokens = 0.15;
  double output_usd_per_million_tokens = 0.075;

  void validate() const;
  [[nodiscard]] double cost(std::int64_t input_tokens, std::int64_t output_tokens) const;
};

struct ChatExchange {
  std::string prompt_text;
  std::string response_text;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double cost_usd = 0.0;
  bool cached = false;
  std::vector<std::string> warnings;
};

/// ceil(character_count / 4), counting UTF-8 code points.
std::int64_t estimate_tokens(std::string_view text) noexcept;

/// What a backend hands back for one request. Usage is optional; the gateway
/// estimates whatever the provider did not report.
struct BackendReply {
  std::string text;
  std::optional<std::int64_t> input_tokens;
  std::optional<std::int64_t> output_tokens;
};

/// A chat-completion provider. Implementations must be safe to call from
/// several threads at once and report failures as Error(transport_failure)
/// or Error(provider_error).
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual BackendReply send(const std::string& prompt, const GenerationParams& params) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_factor = 2.0;
};

struct GatewayOptions {
  TokenBudget budget;
  CostModel cost;
  RetryPolicy retry;
  /// When set, agents' requests go through cached_complete with this directory.
  std::optional<std::filesystem::path> cache_dir;
};

struct UsageTotals {
  std::int64_t exchanges = 0;
  std::int64_t live_calls = 0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  double cost_usd = 0.0;
};

class LlmGateway {
 public:
  LlmGateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options = {});

  /// Live call. Throws Error(over_budget) before contacting the backend when
  /// the prompt estimate exceeds max_input_tokens; retries transport failures
  /// with exponential backoff.
  ChatExchange complete(const std::string& prompt, const GenerationParams& params);

  /// Serves identical (model, params, prompt) requests from one JSON file per
  /// key under `cache_dir`. Cache I/O problems degrade to a live call with a
  /// warning on the exchange.
  ChatExchange cached_complete(const std::string& prompt, const GenerationParams& params,
                               const std::filesystem::path& cache_dir);

  /// complete or cached_complete depending on options().cache_dir.
  ChatExchange request(const std::string& prompt, const GenerationParams& params);

  [[nodiscard]] const GatewayOptions& options() const noexcept { return options_; }
  [[nodiscard]] const TokenBudget& budget() const noexcept { return options_.budget; }
  [[nodiscard]] UsageTotals totals() const;

 private:
  void record(const ChatExchange& exchange, bool live);

  std::shared_ptr<ChatBackend> backend_;
  GatewayOptions options_;
  mutable std::mutex mutex_;
  UsageTotals totals_;
};

/// Hex digest identifying a request in the cache.
std::string cache_key(const std::string& prompt, const GenerationParams& params);

}  // namespace maltopic
