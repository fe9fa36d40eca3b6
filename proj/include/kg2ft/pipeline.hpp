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

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "kg2ft/config.hpp"
#include "kg2ft/graph.hpp"
#include "kg2ft/llm.hpp"
#include "kg2ft/qa.hpp"

namespace kg2ft {

inline constexpr std::string_view kTrainFile = "train.jsonl";
inline constexpr std::string_view kManifestFile = "manifest.json";
// Context / question separator in combined text.
inline constexpr std::string_view kContextSeparator = "\n\n";
// Question / answer separator in training text.
inline constexpr std::string_view kAnswerSeparator = "\n";

// "eval_<task>_<format>.jsonl".
std::string eval_file_name(TaskKind task, AnswerFormat format);
// train.jsonl, the six eval files, manifest.json.
std::vector<std::string> dataset_file_names();

struct TrainingSample {
  std::string context_text;
  QASample qa;
  std::string combined_text;  // context, separator, question, answer
  std::size_t token_estimate = 0;
  NodeId center;
  int partition_index = 0;
  std::string strategy;
  std::vector<Edge> context_edges;  // everything the context verbalizes
  std::optional<std::string> llm_cache_key;
  bool oversized = false;
  bool fallback = false;
};

struct BuildStats {
  std::size_t nodes_visited = 0;
  std::size_t partitions = 0;
  std::size_t oversized = 0;
  std::size_t fallback = 0;
  std::size_t mc_skipped = 0;
  std::size_t descriptors_missing = 0;
  int max_rounds = 0;
  MultihopReport multihop;
};

struct Dataset {
  std::vector<TrainingSample> train;
  std::map<std::pair<TaskKind, AnswerFormat>, std::vector<QASample>> eval;
  EdgeSplit split;
  bool split_applied = false;
  BuildStats stats;
  nlohmann::json manifest;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
};

struct BuildOptions {
  int jobs = 0;  // <= 0: hardware concurrency
  std::optional<std::filesystem::path> llm_cache_dir;
  // Replaces the client built from the config's llm section.
  std::shared_ptr<LlmClient> llm;
};

// Client for cfg.llm: stub (with fixtures), remote (env) or none.
std::shared_ptr<LlmClient> make_llm_client(const LlmConfig& cfg,
                                           std::optional<std::filesystem::path> cache_dir);

// Runs the whole generation in memory. Errors raised while handling a node
// are rethrown with the node and partition (or "partitioning") prepended.
Dataset generate_dataset(const KnowledgeGraph& graph, const RunConfig& cfg,
                         const BuildOptions& options = {});

nlohmann::json training_record(const TrainingSample& s);
nlohmann::json eval_record(std::size_t id, const QASample& s);

// Deletes any manifest, writes the seven data files, then the manifest.
void write_dataset(const Dataset& dataset, const std::filesystem::path& out_dir);

Dataset build_dataset(const KnowledgeGraph& graph, const RunConfig& cfg,
                      const std::filesystem::path& out_dir, const BuildOptions& options = {});

struct DatasetStats {
  std::map<std::string, std::size_t> file_counts;
  std::map<std::string, std::size_t> task_format_counts;  // "fact/open" -> n
  std::size_t train_count = 0;
  std::size_t open_count = 0;
  std::size_t mc_count = 0;
  std::size_t oversized = 0;
  std::size_t fallback = 0;
  std::vector<std::size_t> token_estimates;  // training records, sorted
  std::optional<bool> manifest_matches;      // manifest counts == line counts

  std::size_t token_percentile(double q) const;
  // Bucket upper bound -> count, buckets of `width` tokens.
  std::map<std::size_t, std::size_t> token_histogram(std::size_t width) const;
  nlohmann::json to_json() const;
};

// Accepts a dataset directory or a single .jsonl file. Throws
// MalformedSample(line) on records violating the schema (for example an MC
// record without exactly five distinct options).
DatasetStats dataset_stats(const std::filesystem::path& path,
                           double chars_per_token = 4.0);

}  // namespace kg2ft
