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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kg2ft/graph.hpp"
#include "kg2ft/llm.hpp"
#include "kg2ft/partition.hpp"
#include "kg2ft/templates.hpp"

namespace kg2ft {

enum class StrategyKind {
  kTriples,
  kRelationalGroups,
  kAdjacencyList,
  kSummarized,
  kNodeDescriptors,
};

struct EncodingStrategy {
  StrategyKind kind = StrategyKind::kTriples;
  // Only meaningful for kSummarized; one of the first three kinds.
  StrategyKind base = StrategyKind::kRelationalGroups;

  // "triples", "groups", "adjacency", "summarized(groups)", "descriptors".
  std::string name() const;
  // Accepts the CLI names; "summarized" alone wraps `summarize_base`.
  static EncodingStrategy parse(std::string_view name,
                                std::string_view summarize_base = "groups");

  friend bool operator==(const EncodingStrategy&, const EncodingStrategy&) = default;
};

struct EncodedContext {
  std::string text;
  EncodingStrategy strategy;
  NodeId center;
  int partition_index = 0;
  std::vector<Edge> source_edges;
  std::optional<std::string> llm_cache_key;
  bool fallback = false;
};

// Prompt texts sent as the system message. Leading '#' lines of the shipped
// files are metadata and stripped.
struct PromptSet {
  std::string rewrite;
  std::string topics;
  std::string paraphrase;

  static PromptSet builtin();
  // Reads rewrite_v1.txt, topics_v1.txt, paraphrase_v1.txt from dir.
  static PromptSet load_dir(const std::filesystem::path& dir);
  static std::string strip_metadata(std::string_view file_text);

  std::string rewrite_hash() const;
  std::string topics_hash() const;
  std::string paraphrase_hash() const;
};

// Center groups of p followed by its non-incident groups.
std::vector<RelationGroup> partition_groups(const Partition& p);

// One sentence for a group. Single-edge groups always use the forward
// phrase, so a one-edge group reads exactly like its triple. Multi-node
// incoming groups use the inverse phrase with the heads conjoined; outgoing
// groups use the forward phrase with the tails conjoined.
std::string render_group(const KnowledgeGraph& graph, const RelationGroup& group,
                         const TemplateSet& templates);

// One sentence per edge, in edge order.
std::vector<EncodedContext> encode_triples(const KnowledgeGraph& graph, const Partition& p,
                                           const TemplateSet& templates,
                                           int partition_index = 0);

// One sentence per relation group.
std::vector<EncodedContext> encode_relational_groups(const KnowledgeGraph& graph,
                                                     const Partition& p,
                                                     const TemplateSet& templates,
                                                     int partition_index = 0);

// All group sentences of the partition as one paragraph.
EncodedContext encode_adjacency_list(const KnowledgeGraph& graph, const Partition& p,
                                     const TemplateSet& templates, int partition_index = 0);

// LLM rewrite of base.text. Never throws on backend trouble: falls back to
// the base text with `fallback` set. Edges and center are preserved.
EncodedContext encode_summarized(const EncodedContext& base, LlmClient& llm,
                                 const PromptSet& prompts);

struct DescriptorOptions {
  std::string topic_source_attribute = "abstract";
  // Attributes left out of attribute-mode descriptors.
  std::vector<std::string> skip_attributes = {"abstract"};
};

// Splits a topic-extraction reply into phrases (commas, semicolons,
// newlines; list bullets stripped).
std::vector<std::string> parse_topics(std::string_view reply);

// Nodes without the topic attribute whose neighbours carry it get
// "<label> has published on: t1, t2." built from LLM topic extraction over
// those neighbours (deduplicated case-insensitively, sorted). Other nodes
// get their attributes rendered verbatim. Throws NoDescribableContent.
EncodedContext encode_node_descriptors(const KnowledgeGraph& graph, const NodeId& v,
                                       LlmClient& llm, const PromptSet& prompts,
                                       const DescriptorOptions& options = {});

}  // namespace kg2ft
