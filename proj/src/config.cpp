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

#include "kg2ft/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "kg2ft/encode.hpp"
#include "kg2ft/error.hpp"
#include "kg2ft/partition.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {
namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (known.count(it.key()) == 0) {
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + where + it.key() + "'");
    }
  }
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::vector<std::string> split_list(std::string_view csv) {
  std::vector<std::string> out;
  for (const std::string& item : text::split(csv, ',')) {
    std::string t(text::trim(item));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

json RunConfig::to_json() const {
  json llm_j{{"backend", llm.backend},
             {"fixtures_path", llm.fixtures_path},
             {"max_calls", llm.max_calls ? json(*llm.max_calls) : json(nullptr)},
             {"max_in_flight", llm.max_in_flight},
             {"retry_base_ms", llm.retry_base_ms},
             {"retry_factor", llm.retry_factor},
             {"retry_max_attempts", llm.retry_max_attempts}};
  return json{{"graph_path", graph_path},
              {"k", k},
              {"n_max", n_max},
              {"t_max", t_max},
              {"chars_per_token", chars_per_token},
              {"strategy", strategy},
              {"summarize_base", summarize_base},
              {"tasks", tasks},
              {"formats", formats},
              {"train_tasks", resolved_train_tasks()},
              {"split", split},
              {"seed", seed},
              {"eval_include_context", eval_include_context},
              {"paraphrase_questions", paraphrase_questions},
              {"n_distractors", n_distractors},
              {"templates_path", templates_path},
              {"prompts_dir", prompts_dir},
              {"llm", llm_j}};
}

RunConfig RunConfig::from_json(const json& doc) {
  const json& j = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
  reject_unknown(j,
                 {"graph_path", "k", "n_max", "t_max", "chars_per_token", "strategy",
                  "summarize_base", "tasks", "formats", "train_tasks", "split", "seed",
                  "eval_include_context", "paraphrase_questions", "n_distractors",
                  "templates_path", "prompts_dir", "llm"},
                 "");
  RunConfig c;
  read(j, "graph_path", c.graph_path);
  read(j, "k", c.k);
  read(j, "n_max", c.n_max);
  read(j, "t_max", c.t_max);
  read(j, "chars_per_token", c.chars_per_token);
  read(j, "strategy", c.strategy);
  read(j, "summarize_base", c.summarize_base);
  read(j, "tasks", c.tasks);
  read(j, "formats", c.formats);
  read(j, "train_tasks", c.train_tasks);
  read(j, "split", c.split);
  read(j, "seed", c.seed);
  read(j, "eval_include_context", c.eval_include_context);
  read(j, "paraphrase_questions", c.paraphrase_questions);
  read(j, "n_distractors", c.n_distractors);
  read(j, "templates_path", c.templates_path);
  read(j, "prompts_dir", c.prompts_dir);
  if (auto it = j.find("llm"); it != j.end()) {
    const json& l = *it;
    if (!l.is_object()) throw Error(ErrorCode::kInvalidConfig, "config key 'llm' must be an object");
    reject_unknown(l,
                   {"backend", "fixtures_path", "max_calls", "max_in_flight", "retry_base_ms",
                    "retry_factor", "retry_max_attempts"},
                   "llm.");
    read(l, "backend", c.llm.backend);
    read(l, "fixtures_path", c.llm.fixtures_path);
    if (auto mc = l.find("max_calls"); mc != l.end() && !mc->is_null()) {
      std::size_t n = 0;
      read(l, "max_calls", n);
      c.llm.max_calls = n;
    }
    read(l, "max_in_flight", c.llm.max_in_flight);
    read(l, "retry_base_ms", c.llm.retry_base_ms);
    read(l, "retry_factor", c.llm.retry_factor);
    read(l, "retry_max_attempts", c.llm.retry_max_attempts);
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidConfig, path.string() + " is not valid JSON");
  return from_json(j);
}

void RunConfig::validate() const {
  if (k < 0) throw Error(ErrorCode::kInvalidBudget, "k must be >= 0");
  if (n_max < 2) throw Error(ErrorCode::kInvalidBudget, "n_max must be >= 2");
  TokenBudget{t_max, chars_per_token}.validate();
  EncodingStrategy::parse(strategy, summarize_base);
  if (tasks.empty()) throw Error(ErrorCode::kInvalidConfig, "no tasks enabled");
  for (const std::string& t : tasks) parse_task(t);
  if (formats.empty()) throw Error(ErrorCode::kInvalidConfig, "no formats enabled");
  for (const std::string& f : formats) parse_format(f);
  for (const std::string& t : train_tasks) {
    TaskKind kind = parse_task(t);
    if (kind == TaskKind::kMultiHop) {
      throw Error(ErrorCode::kInvalidConfig, "multihop questions are held out, not trained on");
    }
    if (!contains(tasks, t)) {
      throw Error(ErrorCode::kInvalidConfig, "train task '" + t + "' is not an enabled task");
    }
  }
  if (has_task(TaskKind::kMultiHop) && !(split > 0.0 && split < 1.0)) {
    throw Error(ErrorCode::kInvalidRatio, "split must be in (0, 1)");
  }
  if (n_distractors < 1) throw Error(ErrorCode::kInvalidConfig, "n_distractors must be >= 1");
  if (llm.backend != "stub" && llm.backend != "remote" && llm.backend != "none") {
    throw Error(ErrorCode::kInvalidConfig, "llm backend must be stub|remote|none");
  }
  if (llm.max_in_flight < 1) throw Error(ErrorCode::kInvalidConfig, "max_in_flight must be >= 1");
  if (llm.retry_max_attempts < 1 || llm.retry_base_ms < 0 || llm.retry_factor < 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "invalid retry policy");
  }
}

bool RunConfig::has_task(TaskKind t) const {
  return contains(tasks, to_string(t));
}

bool RunConfig::has_format(AnswerFormat f) const {
  return contains(formats, to_string(f));
}

bool RunConfig::trains_on(TaskKind t) const {
  return contains(resolved_train_tasks(), to_string(t));
}

std::vector<std::string> RunConfig::resolved_train_tasks() const {
  if (!train_tasks.empty()) return train_tasks;
  std::vector<std::string> out;
  for (const char* t : {"fact", "inverse"}) {
    if (contains(tasks, t)) out.emplace_back(t);
  }
  return out;
}

}  // namespace kg2ft
