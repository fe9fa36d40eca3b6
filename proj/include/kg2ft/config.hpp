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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kg2ft/qa.hpp"

namespace kg2ft {

struct LlmConfig {
  std::string backend = "stub";  // stub | remote | none
  std::string fixtures_path;     // stub fixtures, JSON [[substring, response], ...]
  std::optional<std::size_t> max_calls;
  int max_in_flight = 4;
  int retry_base_ms = 1000;
  double retry_factor = 2.0;
  int retry_max_attempts = 5;
};

// Everything that determines a dataset. Serialized verbatim into the
// manifest, so a manifest is itself a valid config file.
struct RunConfig {
  std::string graph_path;
  int k = 1;
  int n_max = 30;
  int t_max = 256;
  double chars_per_token = 4.0;
  std::string strategy = "triples";
  std::string summarize_base = "groups";
  std::vector<std::string> tasks = {"fact", "inverse", "multihop"};
  std::vector<std::string> formats = {"open", "mc"};
  // Empty means the enabled subset of {fact, inverse}.
  std::vector<std::string> train_tasks;
  double split = 0.7;
  std::uint64_t seed = 0;
  bool eval_include_context = false;
  bool paraphrase_questions = false;
  int n_distractors = 4;
  std::string templates_path;  // empty: shipped defaults
  std::string prompts_dir;     // empty: shipped prompts
  LlmConfig llm;

  nlohmann::json to_json() const;
  // Accepts a config object or a manifest (uses its "config" member).
  // Unknown keys raise InvalidConfig.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);

  // Throws InvalidConfig / InvalidBudget / InvalidRatio.
  void validate() const;

  bool has_task(TaskKind t) const;
  bool has_format(AnswerFormat f) const;
  bool trains_on(TaskKind t) const;
  std::vector<std::string> resolved_train_tasks() const;
};

// "a,b , c" -> {"a","b","c"}; empty items dropped.
std::vector<std::string> split_list(std::string_view csv);

}  // namespace kg2ft
