// Copyright 2026 The kg2ft Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <thread>
#include <vector>

#include "kg2ft/error.hpp"
#include "kg2ft/llm.hpp"
#include "test_graphs.hpp"

namespace kg2ft {
namespace {

using std::chrono::milliseconds;

struct Recorder {
  std::vector<milliseconds> sleeps;
  LlmClientOptions options() {
    LlmClientOptions o;
    o.sleep = [this](milliseconds d) { sleeps.push_back(d); };
    return o;
  }
};

PromptRequest req(std::string text) { return PromptRequest{"system", std::move(text), 64, 0.0}; }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no kg2ft::Error thrown";
  return ErrorCode::kInvalidConfig;
}

TEST(Stub, FirstMatchingFixtureWins) {
  auto s = std::make_shared<StubBackend>();
  s->load_fixtures(testing::fixture("llm_fixtures.json"));
  // Both "Insulin human, rDNA origin" and "rDNA" match; the earlier entry wins.
  EXPECT_EQ(s->complete(req("Insulin human, rDNA origin may treat X.")),
            "Insulin therapy from recombinant DNA may treat diabetes mellitus.");
  EXPECT_EQ(s->complete(req("Glucagon rDNA may cause Y.")),
            "Glucagon made from recombinant DNA may cause hyperglycemia.");
  EXPECT_EQ(s->complete(req("unmatched text")), "unmatched text");
  EXPECT_EQ(s->call_count(), 3u);
}

TEST(Stub, IdDependsOnFixtures) {
  StubBackend a, b;
  EXPECT_EQ(a.id(), b.id());
  b.add_fixture("x", "y");
  EXPECT_NE(a.id(), b.id());
}

TEST(Client, CachesByRequest) {
  auto s = std::make_shared<StubBackend>();
  Recorder r;
  LlmClient c(s, r.options());
  EXPECT_EQ(c.complete(req("a")), "a");
  EXPECT_EQ(c.complete(req("a")), "a");
  EXPECT_EQ(c.complete(req("b")), "b");
  EXPECT_EQ(s->call_count(), 2u);
  EXPECT_EQ(c.backend_calls(), 2u);
  EXPECT_EQ(c.cache_hits(), 1u);
  PromptRequest hot = req("a");
  hot.temperature = 0.5;
  EXPECT_NE(c.cache_key(hot), c.cache_key(req("a")));
  PromptRequest longer = req("a");
  longer.max_output_tokens = 65;
  EXPECT_NE(c.cache_key(longer), c.cache_key(req("a")));
}

TEST(Client, DiskCacheSurvivesRestart) {
  auto dir = testing::temp_dir("llm_cache");
  auto s = std::make_shared<StubBackend>();
  s->add_fixture("q", "cached answer");
  {
    Recorder r;
    LlmClientOptions o = r.options();
    o.cache_dir = dir;
    LlmClient c(s, o);
    EXPECT_EQ(c.complete(req("q")), "cached answer");
    EXPECT_FALSE(std::filesystem::is_empty(dir));
  }
  Recorder r;
  LlmClientOptions o = r.options();
  o.cache_dir = dir;
  LlmClient warm(s, o);
  EXPECT_EQ(warm.complete(req("q")), "cached answer");
  EXPECT_EQ(warm.backend_calls(), 0u);
  EXPECT_EQ(warm.cache_hits(), 1u);
  EXPECT_EQ(s->call_count(), 1u);
  std::filesystem::remove_all(dir);
}

TEST(Client, RetriesWithExponentialBackoff) {
  auto s = std::make_shared<StubBackend>();
  s->fail_next(3);
  Recorder r;
  LlmClientOptions o = r.options();
  o.retry = RetryPolicy{milliseconds(100), 2.0, 5};
  LlmClient c(s, o);
  EXPECT_EQ(c.complete(req("x")), "x");
  std::vector<milliseconds> want{milliseconds(100), milliseconds(200), milliseconds(400)};
  EXPECT_EQ(r.sleeps, want);
  EXPECT_EQ(s->call_count(), 4u);
}

TEST(Client, GivesUpAfterMaxAttempts) {
  auto s = std::make_shared<StubBackend>();
  s->fail_next(10);
  Recorder r;
  LlmClientOptions o = r.options();
  o.retry.max_attempts = 3;
  LlmClient c(s, o);
  EXPECT_EQ(code_of([&] { c.complete(req("x")); }), ErrorCode::kBackendUnavailable);
  EXPECT_EQ(s->call_count(), 3u);
  EXPECT_EQ(r.sleeps.size(), 2u);
}

TEST(Client, PermanentFailureIsNotRetried) {
  Recorder r;
  LlmClient c(std::make_shared<DisabledBackend>(), r.options());
  EXPECT_EQ(code_of([&] { c.complete(req("x")); }), ErrorCode::kBackendUnavailable);
  EXPECT_TRUE(r.sleeps.empty());
}

TEST(Client, CallCeiling) {
  auto s = std::make_shared<StubBackend>();
  Recorder r;
  LlmClientOptions o = r.options();
  o.max_calls = 2;
  LlmClient c(s, o);
  c.complete(req("a"));
  c.complete(req("b"));
  c.complete(req("a"));  // cache hits do not count
  EXPECT_EQ(code_of([&] { c.complete(req("c")); }), ErrorCode::kBudgetExceeded);
  EXPECT_EQ(s->call_count(), 2u);
}

TEST(Client, RejectsInvalidRequests) {
  Recorder r;
  LlmClient c(std::make_shared<StubBackend>(), r.options());
  EXPECT_EQ(code_of([&] { c.complete(req("")); }), ErrorCode::kInvalidRequest);
  PromptRequest neg = req("x");
  neg.temperature = -1;
  EXPECT_EQ(code_of([&] { c.complete(neg); }), ErrorCode::kInvalidRequest);
}

TEST(Client, BoundsConcurrency) {
  auto s = std::make_shared<StubBackend>();
  s->set_latency(milliseconds(20));
  Recorder r;
  LlmClientOptions o = r.options();
  o.max_in_flight = 3;
  LlmClient c(s, o);
  std::vector<std::jthread> threads;
  for (int i = 0; i < 12; ++i) {
    threads.emplace_back([&c, i] { c.complete(req("q" + std::to_string(i))); });
  }
  threads.clear();
  EXPECT_EQ(s->call_count(), 12u);
  EXPECT_LE(s->max_in_flight_observed(), 3u);
  EXPECT_GE(s->max_in_flight_observed(), 1u);
}

TEST(Retry, DelaySchedule) {
  RetryPolicy p{milliseconds(1000), 2.0, 5};
  EXPECT_EQ(p.delay_before(2), milliseconds(1000));
  EXPECT_EQ(p.delay_before(5), milliseconds(8000));
}

TEST(Remote, NeedsEndpoint) {
  EXPECT_EQ(code_of([] { RemoteBackend(RemoteConfig{}); }), ErrorCode::kInvalidConfig);
  RemoteConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  cfg.model = "m";
  RemoteBackend b(cfg);
  EXPECT_EQ(b.id(), "remote:http://127.0.0.1:9/v1/chat/completions#m");
}

}  // namespace
}  // namespace kg2ft
