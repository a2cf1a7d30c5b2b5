#include "maltopic/openai_http.hpp"

#include "maltopic/error.hpp"
#include "maltopic/serialize.hpp"

#include <httplib.h>

#include <cstdlib>

namespace maltopic {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

SplitUrl split_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::invalid_argument, "base URL lacks a scheme: " + base_url);
  const auto path_start = base_url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = base_url.substr(0, path_start);
  out.path = path_start == std::string::npos ? std::string{} : base_url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

json post_json(const HttpEndpoint& endpoint, const std::string& route, const json& body) {
  const auto url = split_url(endpoint.base_url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(endpoint.timeout);
  client.set_write_timeout(endpoint.timeout);
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);

  auto result = client.Post(url.path + route, headers, body.dump(), "application/json");
  if (!result) {
    throw Error(ErrorKind::transport_failure, "POST " + endpoint.base_url + route + ": " + httplib::to_string(result.error()));
  }
  if (result->status >= 500 || result->status == 429) {
    // server-side overload and rate limiting are worth retrying
    throw Error(ErrorKind::transport_failure,
                "POST " + endpoint.base_url + route + " returned " + std::to_string(result->status) + ": " + result->body);
  }
  if (result->status < 200 || result->status >= 300) {
    throw Error(ErrorKind::provider_error,
                "POST " + endpoint.base_url + route + " returned " + std::to_string(result->status) + ": " + result->body);
  }
  try {
    return json::parse(result->body);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::provider_error, std::string("response is not JSON: ") + e.what());
  }
}

}  // namespace

std::string api_key_from_env(const std::string& env_var) {
  const char* value = std::getenv(env_var.c_str());
  return value ? std::string(value) : std::string{};
}

OpenAiChatBackend::OpenAiChatBackend(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

BackendReply OpenAiChatBackend::send(const std::string& prompt, const GenerationParams& params) {
  const json body = {
      {"model", params.model_id},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"seed", params.seed},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"max_tokens", params.max_output_tokens},
  };
  const json response = post_json(endpoint_, "/chat/completions", body);
  BackendReply reply;
  try {
    const auto& content = response.at("choices").at(0).at("message").at("content");
    reply.text = content.is_string() ? content.get<std::string>() : std::string{};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::provider_error, std::string("chat response lacks choices[0].message.content: ") + e.what());
  }
  if (const auto usage = response.find("usage"); usage != response.end() && usage->is_object()) {
    if (usage->contains("prompt_tokens")) reply.input_tokens = usage->at("prompt_tokens").get<std::int64_t>();
    if (usage->contains("completion_tokens")) reply.output_tokens = usage->at("completion_tokens").get<std::int64_t>();
  }
  return reply;
}

OpenAiEmbedder::OpenAiEmbedder(HttpEndpoint endpoint, std::string model)
    : endpoint_(std::move(endpoint)), model_(std::move(model)) {}

Embedding OpenAiEmbedder::embed(std::string_view text) {
  const json body = {{"model", model_}, {"input", std::string(text)}};
  const json response = post_json(endpoint_, "/embeddings", body);
  std::vector<double> values;
  try {
    values = response.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::provider_error, std::string("embedding response lacks data[0].embedding: ") + e.what());
  }
  if (values.empty()) throw Error(ErrorKind::provider_error, "empty embedding");
  {
    std::lock_guard lock(mutex_);
    if (dimension_ == 0) dimension_ = static_cast<Eigen::Index>(values.size());
    if (dimension_ != static_cast<Eigen::Index>(values.size())) {
      throw Error(ErrorKind::dimension_mismatch, "provider returned " + std::to_string(values.size()) +
                                                     " components, expected " + std::to_string(dimension_));
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace maltopic
