#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maltopic {

enum class ErrorKind {
  io_failure,
  missing_column,
  malformed_row,
  duplicate_id,
  invalid_argument,
  invalid_spec,
  unknown_field,
  over_budget,
  transport_failure,
  provider_error,
  cache_io_failure,
  unsplittable_response,
  unparseable_output,
  invalid_topic,
  unparseable_after_retry,
  empty_corpus,
  no_words,
  dimension_mismatch,
  zero_vector,
  too_few_topics,
  empty_topics,
  enrichment_failed,
  stage_failure,
  config_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable error kind alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace maltopic
