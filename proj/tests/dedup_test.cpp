#include "maltopic/dedup.hpp"
#include "maltopic/error.hpp"
#include "maltopic/mock_backend.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

namespace maltopic {
namespace {

Topic topic(const std::string& name, std::vector<std::string> words = {"w"}) {
  return {name, "about " + name, "everyone", std::move(words)};
}

TopicBatchResult batch(std::size_t index, std::vector<Topic> topics) {
  TopicBatchResult b;
  b.batch_index = index;
  b.topics = std::move(topics);
  return b;
}

std::vector<std::string> names(const DedupResult& r) {
  std::vector<std::string> out;
  for (const auto& t : r.topics) out.push_back(t.name);
  return out;
}

GatewayOptions fast_options() {
  GatewayOptions o;
  o.retry.initial_backoff = std::chrono::milliseconds(0);
  return o;
}

TEST(DedupDeterministic, MergesByName) {
  const auto r = dedup_deterministic({batch(0, {topic("a"), topic("b"), topic("c")}),
                                      batch(1, {topic("B"), topic("c "), topic("d")})});
  EXPECT_EQ(names(r), (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_EQ(r.method, DedupMethod::deterministic);
  ASSERT_EQ(r.provenance.size(), 4u);
  EXPECT_EQ(r.provenance[1].sources, (std::vector<TopicSource>{{0, "b"}, {1, "B"}}));
  EXPECT_EQ(r.provenance[3].sources, (std::vector<TopicSource>{{1, "d"}}));
}

TEST(DedupDeterministic, DistinctTopicsConcatenate) {
  const auto r = dedup_deterministic({batch(0, {topic("a")}), batch(1, {topic("b")}), batch(2, {topic("c")})});
  EXPECT_EQ(names(r), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(dedup_deterministic({}).topics.empty());
}

TEST(DedupDeterministic, UnionsWordsAndOrdersByBatch) {
  const auto r = dedup_deterministic({batch(1, {topic("x", {"b", "c"})}), batch(0, {topic("X", {"a", "B"})})});
  ASSERT_EQ(r.topics.size(), 1u);
  EXPECT_EQ(r.topics[0].name, "X");
  EXPECT_EQ(r.topics[0].representative_words, (std::vector<std::string>{"a", "B", "c"}));
}

TEST(DedupDeterministic, RepeatedReferenceListCollapses) {
  const auto reference = testing::reference_concern_topics();
  const auto r = dedup_deterministic({batch(0, reference), batch(1, reference)});
  ASSERT_EQ(r.topics.size(), 10u);
  for (const auto& p : r.provenance) EXPECT_EQ(p.sources.size(), 2u);
  EXPECT_EQ(r.topics, reference);
}

TEST(DedupDeterministic, Idempotent) {
  const auto once = dedup_deterministic({batch(0, {topic("a"), topic("b")}), batch(1, {topic("A"), topic("c")})});
  const auto twice = dedup_deterministic({batch(0, once.topics)});
  EXPECT_EQ(twice.topics, once.topics);
}

TEST(DedupLlm, SingleBatchIsSkipped) {
  auto backend = std::make_shared<MockBackend>();
  LlmGateway gateway(backend, fast_options());
  const auto r = dedup_llm({batch(0, {topic("a"), topic("b")})}, gateway, {});
  EXPECT_EQ(r.method, DedupMethod::skipped);
  EXPECT_EQ(names(r), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(backend->calls(), 0u);
  EXPECT_TRUE(dedup_llm({}, gateway, {}).topics.empty());
}

TEST(DedupLlm, MergesSharedTopicWithProvenance) {
  auto backend = std::make_shared<MockBackend>();
  LlmGateway gateway(backend, fast_options());
  const auto r = dedup_llm({batch(0, {topic("Data Privacy and Security Issues"), topic("Cost")}),
                            batch(1, {topic("data privacy and security issues"), topic("Ethics")})},
                           gateway, {});
  EXPECT_EQ(r.method, DedupMethod::llm);
  EXPECT_EQ(names(r), (std::vector<std::string>{"Data Privacy and Security Issues", "Cost", "Ethics"}));
  EXPECT_EQ(r.provenance[0].sources,
            (std::vector<TopicSource>{{0, "Data Privacy and Security Issues"}, {1, "data privacy and security issues"}}));
  EXPECT_EQ(r.exchanges.size(), 1u);
  EXPECT_TRUE(r.fallback_reason.empty());
}

TEST(DedupLlm, UnknownSourceFallsBack) {
  auto backend = std::make_shared<MockBackend>([](const std::string&, std::size_t) {
    return std::optional<std::string>(
        R"([{"name":"Merged","description":"d","respondent_profile":"p","representative_words":["w"],)"
        R"("source_topics":["a","invented"]}])");
  });
  LlmGateway gateway(backend, fast_options());
  const auto r = dedup_llm({batch(0, {topic("a")}), batch(1, {topic("b")})}, gateway, {});
  EXPECT_EQ(r.method, DedupMethod::deterministic);
  EXPECT_NE(r.fallback_reason.find("invented"), std::string::npos);
  EXPECT_EQ(names(r), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(r.exchanges.size(), 1u);
}

TEST(DedupLlm, ExpansionFallsBack) {
  auto backend = std::make_shared<MockBackend>([](const std::string&, std::size_t) {
    std::string out = "[";
    for (int i = 0; i < 3; ++i) {
      out += std::string(i ? "," : "") + R"({"name":"t)" + std::to_string(i) +
             R"(","description":"d","respondent_profile":"p","representative_words":["w"],"source_topics":["a"]})";
    }
    return std::optional<std::string>(out + "]");
  });
  LlmGateway gateway(backend, fast_options());
  const auto r = dedup_llm({batch(0, {topic("a")}), batch(1, {topic("b")})}, gateway, {});
  EXPECT_EQ(r.method, DedupMethod::deterministic);
  EXPECT_FALSE(r.fallback_reason.empty());
}

TEST(DedupLlm, UnparseableAfterRepairFallsBack) {
  auto backend = std::make_shared<MockBackend>(
      [](const std::string&, std::size_t) { return std::optional<std::string>("I merged them."); });
  LlmGateway gateway(backend, fast_options());
  const auto r = dedup_llm({batch(0, {topic("a")}), batch(1, {topic("a")})}, gateway, {});
  EXPECT_EQ(r.method, DedupMethod::deterministic);
  EXPECT_EQ(backend->calls(), 2u);
  EXPECT_EQ(names(r), (std::vector<std::string>{"a"}));
}

TEST(DedupLlm, GatewayErrorsPropagate) {
  auto backend = std::make_shared<MockBackend>();
  LlmGateway gateway(backend, fast_options());
  backend->fail_next_calls(3);
  EXPECT_THROW(dedup_llm({batch(0, {topic("a")}), batch(1, {topic("b")})}, gateway, {}), Error);
}

TEST(DedupLlm, MergesHierarchicallyUnderSmallBudget) {
  const auto reference = testing::reference_concern_topics();
  const std::vector<TopicBatchResult> input = {batch(0, reference), batch(1, reference), batch(2, reference),
                                               batch(3, reference)};
  auto probe = std::make_shared<MockBackend>();
  {
    LlmGateway gateway(probe, fast_options());
    ASSERT_EQ(dedup_llm(input, gateway, {}).method, DedupMethod::llm);
    ASSERT_EQ(probe->calls(), 1u);
  }
  auto options = fast_options();
  options.budget.safety_margin = 0.0;
  options.budget.max_input_tokens = estimate_tokens(probe->prompts().front()) - 1;

  auto backend = std::make_shared<MockBackend>();
  LlmGateway gateway(backend, options);
  const auto r = dedup_llm(input, gateway, {});
  EXPECT_EQ(r.method, DedupMethod::llm);
  EXPECT_EQ(backend->calls(), 3u);
  EXPECT_EQ(r.topics, reference);
  for (const auto& p : r.provenance) {
    ASSERT_EQ(p.sources.size(), 4u);
    for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(p.sources[b].batch_index, b);
  }
}

}  // namespace
}  // namespace maltopic
