#pragma once

#include "maltopic/llm.hpp"

#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace maltopic {

/// Offline, rule-driven backend. Recognises the three agent prompt shapes:
///   enrichment: "As a <first context value> with <value> <field words>...: <text>"
///   topics:     a JSON topic list built from the most frequent content words
///               of the numbered responses
///   dedup:      input topics merged by normalised name
/// Any other prompt gets a digest-derived string. The reply is a pure
/// function of (prompt, params) unless a responder override is installed.
class MockBackend : public ChatBackend {
 public:
  /// Returning a value short-circuits the built-in rules for that call.
  /// `call_index` counts calls to send() starting at 0.
  using Responder = std::function<std::optional<std::string>(const std::string& prompt, std::size_t call_index)>;

  MockBackend() = default;
  explicit MockBackend(Responder responder) : responder_(std::move(responder)) {}

  BackendReply send(const std::string& prompt, const GenerationParams& params) override;

  /// The next `n` calls fail with Error(transport_failure).
  void fail_next_calls(int n) { pending_failures_ = n; }

  [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }
  [[nodiscard]] std::vector<std::string> prompts() const;

  static std::string enrichment_rule(const std::string& prompt);
  static std::string topic_rule(const std::string& prompt);
  static std::string dedup_rule(const std::string& prompt);

 private:
  Responder responder_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<int> pending_failures_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> prompts_;
};

}  // namespace maltopic
