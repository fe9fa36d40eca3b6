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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kg2ft/encode.hpp"
#include "kg2ft/graph.hpp"
#include "kg2ft/llm.hpp"
#include "kg2ft/templates.hpp"

namespace kg2ft {

enum class TaskKind { kFactRecall, kInverseFactRecall, kMultiHop };
enum class AnswerFormat { kOpenEnded, kMultipleChoice };

// "fact", "inverse", "multihop".
std::string_view to_string(TaskKind t);
// "open", "mc".
std::string_view to_string(AnswerFormat f);
// Throws InvalidConfig.
TaskKind parse_task(std::string_view name);
AnswerFormat parse_format(std::string_view name);

// What the answer nodes are relative to the question's anchor.
enum class AnswerRole {
  kHeads,    // heads of (?, relation, anchor)
  kTails,    // tails of (anchor, relation, ?)
  kCoHeads,  // heads of (?, relation, anchor) other than the subject
};

struct QASample {
  TaskKind task = TaskKind::kFactRecall;
  AnswerFormat format = AnswerFormat::kOpenEnded;
  std::string question_text;
  std::string answer_text;
  std::vector<std::string> options;  // MC only, 5 entries
  int correct_index = -1;            // MC only
  std::vector<Edge> source_edges;

  std::string relation;
  AnswerRole role = AnswerRole::kHeads;
  NodeId anchor;   // endpoint the answers hang off
  NodeId subject;  // entity the question is about; never a distractor
  std::vector<NodeId> answer_nodes;  // sorted

  std::optional<std::uint64_t> mc_seed;
  bool paraphrase_fallback = false;
  NodeId center;
  int partition_index = 0;
};

struct EdgeSplit {
  std::vector<Edge> train_edges;  // canonical order
  std::vector<Edge> test_edges;   // canonical order
  double ratio = 0.7;
  std::uint64_t seed = 0;

  bool is_test(const Edge& e) const;
  bool is_train(const Edge& e) const;
};

// Canonically ordered edges shuffled by Fisher-Yates with DeterministicRng(seed);
// the first floor(ratio * |E|) are training edges. Throws InvalidRatio unless
// 0 < ratio < 1.
EdgeSplit split_edges(const KnowledgeGraph& graph, double ratio, std::uint64_t seed);

// Fact recall: one open sample per center-incoming group of ctx, asking for
// the heads given the center.
std::vector<QASample> gen_fact_qa(const KnowledgeGraph& graph, const EncodedContext& ctx,
                                  const TemplateSet& templates);

// Inverse fact recall: one open sample per center-outgoing group of ctx
// (one per (relation, head)), asking for the tails given the center.
std::vector<QASample> gen_inverse_qa(const KnowledgeGraph& graph, const EncodedContext& ctx,
                                     const TemplateSet& templates);

struct MultihopReport {
  std::size_t test_edges = 0;
  std::size_t eligible = 0;
  std::size_t skipped_disconnected = 0;
  std::size_t skipped_missing_lookup = 0;
  std::size_t skipped_no_co_heads = 0;
  std::size_t questions = 0;
};

struct MultihopResult {
  std::vector<QASample> samples;
  MultihopReport report;
};

// True when a and b are within two undirected hops in g.
bool within_two_hops(const KnowledgeGraph& g, const NodeId& a, const NodeId& b);

// Questions over held-out edges whose endpoints are within two hops in
// `train`. `tail` mode groups eligible edges by (head, relation); `co_heads`
// mode asks one question per edge. Lookup slots ({tail.<rel>}) resolve in
// `train`; an unresolved slot skips the edge.
MultihopResult gen_multihop_qa(const KnowledgeGraph& full, const EdgeSplit& split,
                               const KnowledgeGraph& train, const TemplateSet& templates);

// Every node that correctly answers `sample` in g (subject excluded).
std::vector<NodeId> valid_answers(const KnowledgeGraph& g, const QASample& sample);

// Nodes indexed by node_type, each list in NodeId order.
class DistractorPool {
 public:
  explicit DistractorPool(const KnowledgeGraph& graph);
  const std::vector<NodeId>& of_type(const std::string& node_type) const;

 private:
  std::map<std::string, std::vector<NodeId>> by_type_;
  std::vector<NodeId> empty_;
};

// Stable per-question seed: derive_seed(seed, task|relation|anchor|subject).
std::uint64_t question_seed(std::uint64_t seed, const QASample& sample);

// Multiple-choice copy of an open sample. The canonically first answer node
// is the correct option; distractors share its node_type, are not valid
// answers in `full`, are neither anchor nor subject, and have labels distinct
// from every other option after answer normalization. Throws
// InsufficientDistractorPool.
QASample to_multiple_choice(const QASample& sample, const KnowledgeGraph& full,
                            const DistractorPool& pool, std::uint64_t seed,
                            int n_distractors = 4);

// LLM rewording of question_text; on failure keeps the text and sets
// paraphrase_fallback.
QASample paraphrase_question(const QASample& sample, LlmClient& llm, const PromptSet& prompts);

}  // namespace kg2ft
