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

#include "kg2ft/llm.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

#include "kg2ft/error.hpp"
#include "kg2ft/hash.hpp"

namespace kg2ft {
namespace {

using nlohmann::json;

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v == nullptr ? std::string() : std::string(v);
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json request_json(const PromptRequest& r) {
  return json{{"system", r.system_text},
              {"user", r.user_text},
              {"max_output_tokens", r.max_output_tokens},
              {"temperature", r.temperature}};
}

}  // namespace

// ---------------------------------------------------------------- stub

void StubBackend::register_fixtures(
    const std::vector<std::pair<std::string, std::string>>& fixtures) {
  std::lock_guard lock(mu_);
  fixtures_.insert(fixtures_.end(), fixtures.begin(), fixtures.end());
}

void StubBackend::add_fixture(std::string substring, std::string response) {
  std::lock_guard lock(mu_);
  fixtures_.emplace_back(std::move(substring), std::move(response));
}

void StubBackend::load_fixtures(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw Error(ErrorCode::kInvalidConfig, "fixture file must be a JSON array of pairs");
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const json& p : doc) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
      throw Error(ErrorCode::kInvalidConfig, "fixture entries must be [substring, response]");
    }
    pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  register_fixtures(pairs);
}

std::string StubBackend::id() const {
  std::lock_guard lock(mu_);
  json j = json::array();
  for (const auto& [k, v] : fixtures_) j.push_back(json::array({k, v}));
  return "stub:" + sha256_hex(j.dump()).substr(0, 16);
}

std::string StubBackend::complete(const PromptRequest& request) {
  calls_.fetch_add(1);
  std::size_t now = in_flight_.fetch_add(1) + 1;
  std::size_t seen = max_in_flight_.load();
  while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
  }
  struct Leave {
    std::atomic<std::size_t>& n;
    ~Leave() { n.fetch_sub(1); }
  } leave{in_flight_};

  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  if (!available_.load()) throw BackendFailure("stub backend disabled", false);
  int pending = fail_next_.load();
  while (pending > 0 && !fail_next_.compare_exchange_weak(pending, pending - 1)) {
  }
  if (pending > 0) throw BackendFailure("stub simulated failure", true, 503);

  std::lock_guard lock(mu_);
  for (const auto& [needle, response] : fixtures_) {
    if (request.user_text.find(needle) != std::string::npos) return response;
  }
  return echo(request);
}

std::string DisabledBackend::complete(const PromptRequest&) {
  throw BackendFailure("LLM backend disabled", false);
}

// -------------------------------------------------------------- remote

RemoteConfig RemoteConfig::from_env() {
  RemoteConfig c;
  c.endpoint = env_or_empty("KG2FT_LLM_ENDPOINT");
  c.api_key = env_or_empty("KG2FT_LLM_API_KEY");
  c.model = env_or_empty("KG2FT_LLM_MODEL");
  return c;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "remote LLM backend needs KG2FT_LLM_ENDPOINT");
  }
  std::size_t scheme = config_.endpoint.find("://");
  if (scheme == std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig, "endpoint must be an http(s) URL");
  }
  std::size_t slash = config_.endpoint.find('/', scheme + 3);
  base_ = config_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
}

std::string RemoteBackend::id() const {
  return "remote:" + config_.endpoint + "#" + config_.model;
}

std::string RemoteBackend::complete(const PromptRequest& request) {
  httplib::Client cli(base_);
  cli.set_connection_timeout(config_.timeout);
  cli.set_read_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  json body{{"model", config_.model},
            {"messages",
             json::array({json{{"role", "system"}, {"content", request.system_text}},
                          json{{"role", "user"}, {"content", request.user_text}}})},
            {"max_tokens", request.max_output_tokens},
            {"temperature", request.temperature}};
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendFailure("request failed: " + httplib::to_string(res.error()), true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw BackendFailure("HTTP " + std::to_string(res->status), true, res->status);
  }
  if (res->status != 200) {
    throw BackendFailure("HTTP " + std::to_string(res->status) + ": " + res->body, false,
                         res->status);
  }
  json reply = json::parse(res->body, nullptr, false);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw BackendFailure("malformed completion response", false, res->status);
  }
}

// --------------------------------------------------------------- cache

ResponseCache::ResponseCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return *dir_ / key.substr(0, 2) / key;
}

std::optional<std::string> ResponseCache::get(const std::string& key) {
  {
    std::lock_guard lock(mu_);
    auto it = memory_.find(key);
    if (it != memory_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  json rec = json::parse(in, nullptr, false);
  if (rec.is_discarded() || !rec.contains("response") || rec.value("key", "") != key) {
    return std::nullopt;
  }
  std::string response = rec["response"].get<std::string>();
  std::lock_guard lock(mu_);
  memory_.emplace(key, response);
  return response;
}

void ResponseCache::put(const std::string& key, const std::string& backend_id,
                        const PromptRequest& request, const std::string& response) {
  {
    std::lock_guard lock(mu_);
    memory_.emplace(key, response);
  }
  if (!dir_) return;
  std::filesystem::path target = path_for(key);
  std::filesystem::create_directories(target.parent_path());
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::this_thread::get_id() << "." << tmp_counter_.fetch_add(1);
  std::filesystem::path tmp = target.parent_path() / tmp_name.str();
  json rec{{"key", key},
           {"backend", backend_id},
           {"request", request_json(request)},
           {"response", response},
           {"created_at", utc_timestamp()}};
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << rec.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, target);
}

// -------------------------------------------------------------- client

std::chrono::milliseconds RetryPolicy::delay_before(int attempt) const {
  double scale = std::pow(factor, attempt - 2);
  return std::chrono::milliseconds(
      static_cast<long long>(static_cast<double>(base_delay.count()) * scale));
}

LlmClient::LlmClient(std::shared_ptr<CompletionBackend> backend, LlmClientOptions options)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      cache_(options_.cache_dir),
      slots_(std::max(1, std::min(options_.max_in_flight, 1024))) {
  if (!backend_) throw Error(ErrorCode::kInvalidConfig, "LlmClient without a backend");
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::string LlmClient::cache_key(const PromptRequest& request) const {
  json j{{"backend", backend_->id()}, {"request", request_json(request)}};
  return sha256_hex(j.dump());
}

std::string LlmClient::complete(const PromptRequest& request) {
  if (request.user_text.empty()) {
    throw Error(ErrorCode::kInvalidRequest, "empty user_text");
  }
  if (request.temperature < 0.0 || request.max_output_tokens <= 0) {
    throw Error(ErrorCode::kInvalidRequest, "temperature must be >= 0 and max tokens > 0");
  }
  const std::string key = cache_key(request);
  if (auto hit = cache_.get(key)) {
    hits_.fetch_add(1);
    return *hit;
  }
  std::string response = call_with_retry(request);
  cache_.put(key, backend_->id(), request, response);
  return response;
}

std::string LlmClient::call_with_retry(const PromptRequest& request) {
  std::string last_error;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    if (attempt > 1) options_.sleep(options_.retry.delay_before(attempt));
    std::size_t before = calls_.fetch_add(1);
    if (options_.max_calls && before >= *options_.max_calls) {
      calls_.fetch_sub(1);
      throw Error(ErrorCode::kBudgetExceeded,
                  "LLM call ceiling of " + std::to_string(*options_.max_calls) + " reached");
    }
    try {
      slots_.acquire();
      struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
      } release{slots_};
      return backend_->complete(request);
    } catch (const BackendFailure& f) {
      if (!f.retryable()) {
        if (f.status() >= 400 && f.status() < 500) {
          throw Error(ErrorCode::kInvalidRequest, f.what());
        }
        throw Error(ErrorCode::kBackendUnavailable, f.what());
      }
      last_error = f.what();
    }
  }
  throw Error(ErrorCode::kBackendUnavailable,
              "giving up after " + std::to_string(options_.retry.max_attempts) +
                  " attempts: " + last_error);
}

}  // namespace kg2ft
