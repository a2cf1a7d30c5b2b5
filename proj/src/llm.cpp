#include "maltopic/llm.hpp"

#include "maltopic/digest.hpp"
#include "maltopic/error.hpp"
#include "maltopic/serialize.hpp"
#include "maltopic/text.hpp"

#include <cmath>
#include <thread>

namespace maltopic {

void GenerationParams::validate() const {
  if (model_id.empty()) throw Error(ErrorKind::invalid_argument, "model_id is empty");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorKind::invalid_argument, "temperature must lie in [0, 2]");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorKind::invalid_argument, "top_p must lie in (0, 1]");
  if (max_output_tokens <= 0) throw Error(ErrorKind::invalid_argument, "max_output_tokens must be positive");
}

void TokenBudget::validate() const {
  if (max_input_tokens <= 0 || max_output_tokens <= 0) {
    throw Error(ErrorKind::invalid_argument, "token budget limits must be positive");
  }
  if (!(safety_margin >= 0.0 && safety_margin < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "safety_margin must lie in [0, 1)");
  }
}

std::int64_t TokenBudget::effective_input_tokens() const {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(max_input_tokens) * (1.0 - safety_margin)));
}

void CostModel::validate() const {
  if (!(input_usd_per_million_tokens >= 0.0) || !(output_usd_per_million_tokens >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "token prices must be nonnegative");
  }
}

double CostModel::cost(std::int64_t input_tokens, std::int64_t output_tokens) const {
  return static_cast<double>(input_tokens) * input_usd_per_million_tokens / 1e6 +
         static_cast<double>(output_tokens) * output_usd_per_million_tokens / 1e6;
}

std::int64_t estimate_tokens(std::string_view text) noexcept {
  std::int64_t chars = 0;
  for (const char c : text) {
    // count UTF-8 lead bytes only
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++chars;
  }
  return (chars + 3) / 4;
}

std::string cache_key(const std::string& prompt, const GenerationParams& params) {
  const json key = {{"params", params}, {"prompt", prompt}};
  return sha256_hex(key.dump());
}

LlmGateway::LlmGateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
  if (!backend_) throw Error(ErrorKind::invalid_argument, "gateway needs a backend");
  options_.budget.validate();
  options_.cost.validate();
  if (options_.retry.max_attempts < 1) throw Error(ErrorKind::invalid_argument, "retry.max_attempts must be >= 1");
}

ChatExchange LlmGateway::complete(const std::string& prompt, const GenerationParams& params) {
  params.validate();
  const auto estimated = estimate_tokens(prompt);
  if (estimated > options_.budget.max_input_tokens) {
    throw Error(ErrorKind::over_budget, "prompt estimated at " + std::to_string(estimated) +
                                            " tokens exceeds the input limit of " +
                                            std::to_string(options_.budget.max_input_tokens));
  }

  auto delay = options_.retry.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      BackendReply reply = backend_->send(prompt, params);
      ChatExchange exchange;
      exchange.prompt_text = prompt;
      exchange.input_tokens = reply.input_tokens.value_or(estimated);
      exchange.output_tokens = reply.output_tokens.value_or(estimate_tokens(reply.text));
      exchange.response_text = std::move(reply.text);
      exchange.cost_usd = options_.cost.cost(exchange.input_tokens, exchange.output_tokens);
      record(exchange, true);
      return exchange;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::transport_failure || attempt >= options_.retry.max_attempts) throw;
    }
    std::this_thread::sleep_for(delay);
    delay = std::chrono::milliseconds(
        static_cast<std::chrono::milliseconds::rep>(static_cast<double>(delay.count()) * options_.retry.backoff_factor));
  }
}

ChatExchange LlmGateway::cached_complete(const std::string& prompt, const GenerationParams& params,
                                         const std::filesystem::path& cache_dir) {
  const auto path = cache_dir / (cache_key(prompt, params) + ".json");
  std::vector<std::string> warnings;

  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    try {
      auto exchange = json::parse(read_file(path)).get<ChatExchange>();
      if (exchange.prompt_text == prompt) {
        exchange.cached = true;
        exchange.warnings.clear();
        record(exchange, false);
        return exchange;
      }
      warnings.push_back("cache entry " + path.filename().string() + " holds a different prompt; ignored");
    } catch (const std::exception& e) {
      warnings.push_back(std::string("unreadable cache entry ignored: ") + e.what());
    }
  }

  auto exchange = complete(prompt, params);
  try {
    std::filesystem::create_directories(cache_dir);
    ChatExchange stored = exchange;
    stored.warnings.clear();
    write_file_atomic(path, dump(json(stored)));
  } catch (const std::exception& e) {
    warnings.push_back(std::string(to_string(ErrorKind::cache_io_failure)) + ": " + e.what());
  }
  exchange.warnings = std::move(warnings);
  return exchange;
}

ChatExchange LlmGateway::request(const std::string& prompt, const GenerationParams& params) {
  if (options_.cache_dir) return cached_complete(prompt, params, *options_.cache_dir);
  return complete(prompt, params);
}

UsageTotals LlmGateway::totals() const {
  std::lock_guard lock(mutex_);
  return totals_;
}

void LlmGateway::record(const ChatExchange& exchange, bool live) {
  std::lock_guard lock(mutex_);
  ++totals_.exchanges;
  if (live) ++totals_.live_calls;
  totals_.input_tokens += exchange.input_tokens;
  totals_.output_tokens += exchange.output_tokens;
  totals_.cost_usd += exchange.cost_usd;
}

}  // namespace maltopic
