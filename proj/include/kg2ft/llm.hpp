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

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kg2ft {

struct PromptRequest {
  std::string system_text;
  std::string user_text;
  int max_output_tokens = 512;
  double temperature = 0.0;
};

// Raised by backends. Retryable failures (network, 429, 5xx) are retried by
// LlmClient; the rest surface immediately.
class BackendFailure : public std::runtime_error {
 public:
  BackendFailure(const std::string& what, bool retryable, int status = 0)
      : std::runtime_error(what), retryable_(retryable), status_(status) {}
  bool retryable() const noexcept { return retryable_; }
  int status() const noexcept { return status_; }

 private:
  bool retryable_;
  int status_;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  // Part of every cache key.
  virtual std::string id() const = 0;
  virtual std::string complete(const PromptRequest& request) = 0;
};

// Deterministic offline backend. Answers with the response of the first
// registered fixture whose key is a substring of the request's user_text.
// Unmatched requests get the echo transform: user_text returned verbatim.
class StubBackend : public CompletionBackend {
 public:
  StubBackend() = default;

  void register_fixtures(const std::vector<std::pair<std::string, std::string>>& fixtures);
  void add_fixture(std::string substring, std::string response);
  // Loads a JSON array of [substring, response] pairs.
  void load_fixtures(const std::filesystem::path& path);

  // Test hooks.
  void fail_next(int n) { fail_next_ = n; }                // retryable failures
  void set_available(bool available) { available_ = available; }  // permanent
  void set_latency(std::chrono::milliseconds d) { latency_ = d; }

  std::size_t call_count() const { return calls_.load(); }
  std::size_t max_in_flight_observed() const { return max_in_flight_.load(); }

  std::string id() const override;
  std::string complete(const PromptRequest& request) override;

  static std::string echo(const PromptRequest& request) { return request.user_text; }

 private:
  mutable std::mutex mu_;
  std::vector<std::pair<std::string, std::string>> fixtures_;
  std::atomic<int> fail_next_{0};
  std::atomic<bool> available_{true};
  std::chrono::milliseconds latency_{0};
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
};

// Always fails permanently; the pipeline falls back to base encodings.
class DisabledBackend : public CompletionBackend {
 public:
  std::string id() const override { return "disabled"; }
  std::string complete(const PromptRequest& request) override;
};

struct RemoteConfig {
  std::string endpoint;  // full URL of a chat-completions route
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{60};

  // KG2FT_LLM_ENDPOINT, KG2FT_LLM_API_KEY, KG2FT_LLM_MODEL.
  static RemoteConfig from_env();
};

// Minimal chat-completion wire protocol:
//   POST <endpoint>  Authorization: Bearer <key>
//   {"model":..,"messages":[{"role":"system",..},{"role":"user",..}],
//    "max_tokens":..,"temperature":..}
//   -> {"choices":[{"message":{"content":"..."}}]}
class RemoteBackend : public CompletionBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);
  std::string id() const override;
  std::string complete(const PromptRequest& request) override;

 private:
  RemoteConfig config_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
};

// Content-addressed response cache: <dir>/<key[0:2]>/<key>, one JSON record
// per file, written via temp file + rename. Also memoized in memory.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> dir);

  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, const std::string& backend_id,
           const PromptRequest& request, const std::string& response);

  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::unordered_map<std::string, std::string> memory_;
  std::atomic<std::size_t> tmp_counter_{0};
};

struct RetryPolicy {
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  int max_attempts = 5;

  // Delay before attempt `attempt` (1-based, attempt >= 2).
  std::chrono::milliseconds delay_before(int attempt) const;
};

struct LlmClientOptions {
  RetryPolicy retry;
  int max_in_flight = 4;
  std::optional<std::size_t> max_calls;
  std::optional<std::filesystem::path> cache_dir;
  // Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Thread-safe front end: cache, retries with exponential backoff, bounded
// in-flight calls and a per-run call ceiling.
class LlmClient {
 public:
  LlmClient(std::shared_ptr<CompletionBackend> backend, LlmClientOptions options);

  // Throws BackendUnavailable, BudgetExceeded, InvalidRequest.
  std::string complete(const PromptRequest& request);

  std::string cache_key(const PromptRequest& request) const;
  std::string backend_id() const { return backend_->id(); }

  std::size_t backend_calls() const { return calls_.load(); }
  std::size_t cache_hits() const { return hits_.load(); }

 private:
  std::string call_with_retry(const PromptRequest& request);

  std::shared_ptr<CompletionBackend> backend_;
  LlmClientOptions options_;
  ResponseCache cache_;
  std::counting_semaphore<1024> slots_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> hits_{0};
};

}  // namespace kg2ft
