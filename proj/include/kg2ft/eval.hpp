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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "kg2ft/qa.hpp"

namespace kg2ft {

struct EvalItem {
  std::size_t id = 0;
  std::string question;
  std::string answer;
  std::vector<std::string> options;
  int correct_index = -1;
  TaskKind task = TaskKind::kFactRecall;
  AnswerFormat format = AnswerFormat::kOpenEnded;
};

// Throws Io, MalformedSample(line).
std::vector<EvalItem> load_eval_file(const std::filesystem::path& path);
std::vector<EvalItem> parse_eval_lines(std::istream& in);

// {"sample_id": n, "response": "..."} or {"sample_id": n, "choice": k}.
struct ModelResponse {
  std::size_t sample_id = 0;
  std::optional<std::string> response;
  std::optional<int> choice;
};

// Throws Io, MalformedSample(line).
std::vector<ModelResponse> load_responses(const std::filesystem::path& path);
std::vector<ModelResponse> parse_response_lines(std::istream& in);
void write_responses(const std::vector<ModelResponse>& responses,
                     const std::filesystem::path& path);

struct SampleScore {
  std::size_t sample_id = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // MC and exact match: 1 or 0, mirrored in precision/recall/f1.
  std::optional<double> score;
};

// Shared with the semantic scorer. Metrics absent for a metric kind are null.
struct ScoreReport {
  std::string metric;  // mc | exact | token-f1 | bertscore
  std::string task;
  std::string format;
  std::size_t n = 0;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::vector<SampleScore> samples;

  nlohmann::json to_json() const;
  // Throws MalformedSample on schema violations (scores outside [0,1],
  // n != samples when samples are present).
  static ScoreReport from_json(const nlohmann::json& j);
  static ScoreReport load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  // Human summary, e.g. "mc accuracy on fact/mc: 61.23% (n=300)".
  std::string summary() const;
};

// Fraction of items whose chosen option equals correct_index. Text responses
// are matched to an option by normalized equality; unmatched text is wrong.
// Throws FormatMismatch, MissingResponse.
ScoreReport score_mc(const std::vector<EvalItem>& items,
                     const std::vector<ModelResponse>& responses);

// 1 iff normalize_answer(response) == normalize_answer(answer).
ScoreReport score_exact(const std::vector<EvalItem>& items,
                        const std::vector<ModelResponse>& responses);

// Bag-of-tokens precision / recall / F1 over answer_tokens.
ScoreReport score_token_f1(const std::vector<EvalItem>& items,
                           const std::vector<ModelResponse>& responses);

struct TokenF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
// Empty vs empty is 1.0 throughout; empty vs non-empty is 0.0.
TokenF1 token_f1(std::string_view response, std::string_view answer);

enum class ResponderKind { kGold, kRandom, kBlank };
ResponderKind parse_responder(std::string_view name);

// Open-ended random responses are this fixed token.
inline constexpr std::string_view kNonsenseToken = "zzxqj";

std::vector<ModelResponse> reference_responder(ResponderKind kind,
                                               const std::vector<EvalItem>& items,
                                               std::uint64_t seed = 0);

}  // namespace kg2ft
