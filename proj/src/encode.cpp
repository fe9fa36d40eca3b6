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

#include "kg2ft/encode.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>

#include "kg2ft/error.hpp"
#include "kg2ft/hash.hpp"
#include "kg2ft/resources.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {
namespace {

std::string_view kind_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::kTriples: return "triples";
    case StrategyKind::kRelationalGroups: return "groups";
    case StrategyKind::kAdjacencyList: return "adjacency";
    case StrategyKind::kSummarized: return "summarized";
    case StrategyKind::kNodeDescriptors: return "descriptors";
  }
  return "unknown";
}

StrategyKind base_kind(std::string_view name) {
  if (name == "triples") return StrategyKind::kTriples;
  if (name == "groups") return StrategyKind::kRelationalGroups;
  if (name == "adjacency") return StrategyKind::kAdjacencyList;
  throw Error(ErrorCode::kInvalidConfig,
              "summarization base must be triples|groups|adjacency, got '" + std::string(name) + "'");
}

std::vector<std::string> labels_of(const KnowledgeGraph& graph, const std::vector<NodeId>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const NodeId& id : ids) out.push_back(graph.node(id).label);
  return out;
}

std::string sentence(std::string s) {
  return text::terminate_sentence(text::sentence_case(std::move(s)));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ContextSubgraph partition_as_context(const Partition& p) {
  ContextSubgraph ctx;
  ctx.center = p.center;
  ctx.edges = p.edges;
  return ctx;
}

}  // namespace

std::string EncodingStrategy::name() const {
  if (kind == StrategyKind::kSummarized) {
    return "summarized(" + std::string(kind_name(base)) + ")";
  }
  return std::string(kind_name(kind));
}

EncodingStrategy EncodingStrategy::parse(std::string_view name, std::string_view summarize_base) {
  if (name == "summarized") return {StrategyKind::kSummarized, base_kind(summarize_base)};
  if (name.starts_with("summarized(") && name.ends_with(")")) {
    return {StrategyKind::kSummarized, base_kind(name.substr(11, name.size() - 12))};
  }
  if (name == "descriptors") return {StrategyKind::kNodeDescriptors, StrategyKind::kAdjacencyList};
  if (name == "triples" || name == "groups" || name == "adjacency") {
    return {base_kind(name), StrategyKind::kRelationalGroups};
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown strategy '" + std::string(name) + "'");
}

PromptSet PromptSet::builtin() {
  return PromptSet{strip_metadata(resources::rewrite_prompt()),
                   strip_metadata(resources::topic_prompt()),
                   strip_metadata(resources::paraphrase_prompt())};
}

PromptSet PromptSet::load_dir(const std::filesystem::path& dir) {
  return PromptSet{strip_metadata(read_file(dir / "rewrite_v1.txt")),
                   strip_metadata(read_file(dir / "topics_v1.txt")),
                   strip_metadata(read_file(dir / "paraphrase_v1.txt"))};
}

std::string PromptSet::strip_metadata(std::string_view file_text) {
  while (file_text.starts_with("#")) {
    std::size_t nl = file_text.find('\n');
    file_text = nl == std::string_view::npos ? std::string_view() : file_text.substr(nl + 1);
  }
  return std::string(text::trim(file_text));
}

std::string PromptSet::rewrite_hash() const { return sha256_hex(rewrite); }
std::string PromptSet::topics_hash() const { return sha256_hex(topics); }
std::string PromptSet::paraphrase_hash() const { return sha256_hex(paraphrase); }

std::vector<RelationGroup> partition_groups(const Partition& p) {
  ContextSubgraph ctx = partition_as_context(p);
  std::vector<RelationGroup> groups = relation_groups(ctx);
  for (RelationGroup& g : peripheral_groups(ctx)) groups.push_back(std::move(g));
  return groups;
}

std::string render_group(const KnowledgeGraph& graph, const RelationGroup& group,
                         const TemplateSet& templates) {
  const RelationType& rel = templates.at(group.relation);
  if (group.edges.size() == 1) {
    const Edge& e = group.edges.front();
    return sentence(text::fill_template(
        rel.forward_phrase,
        {{"head", graph.node(e.head).label}, {"tail", graph.node(e.tail).label}}));
  }
  std::string anchor = graph.node(group.anchor).label;
  std::string others = text::join_conjunction(labels_of(graph, group.nodes));
  if (group.direction == Direction::kIncoming) {
    return sentence(text::fill_template(rel.inverse_phrase, {{"head", others}, {"tail", anchor}}));
  }
  return sentence(text::fill_template(rel.forward_phrase, {{"head", anchor}, {"tail", others}}));
}

std::vector<EncodedContext> encode_triples(const KnowledgeGraph& graph, const Partition& p,
                                           const TemplateSet& templates, int partition_index) {
  std::vector<EncodedContext> out;
  out.reserve(p.edges.size());
  for (const Edge& e : p.edges) {
    const RelationType& rel = templates.at(e.relation);
    EncodedContext c;
    c.text = sentence(text::fill_template(
        rel.forward_phrase,
        {{"head", graph.node(e.head).label}, {"tail", graph.node(e.tail).label}}));
    c.strategy = {StrategyKind::kTriples, StrategyKind::kRelationalGroups};
    c.center = p.center;
    c.partition_index = partition_index;
    c.source_edges = {e};
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<EncodedContext> encode_relational_groups(const KnowledgeGraph& graph,
                                                     const Partition& p,
                                                     const TemplateSet& templates,
                                                     int partition_index) {
  std::vector<EncodedContext> out;
  for (RelationGroup& g : partition_groups(p)) {
    EncodedContext c;
    c.text = render_group(graph, g, templates);
    c.strategy = {StrategyKind::kRelationalGroups, StrategyKind::kRelationalGroups};
    c.center = p.center;
    c.partition_index = partition_index;
    c.source_edges = std::move(g.edges);
    out.push_back(std::move(c));
  }
  return out;
}

EncodedContext encode_adjacency_list(const KnowledgeGraph& graph, const Partition& p,
                                     const TemplateSet& templates, int partition_index) {
  EncodedContext c;
  c.strategy = {StrategyKind::kAdjacencyList, StrategyKind::kRelationalGroups};
  c.center = p.center;
  c.partition_index = partition_index;
  for (const RelationGroup& g : partition_groups(p)) {
    if (!c.text.empty()) c.text += ' ';
    c.text += render_group(graph, g, templates);
    c.source_edges.insert(c.source_edges.end(), g.edges.begin(), g.edges.end());
  }
  return c;
}

EncodedContext encode_summarized(const EncodedContext& base, LlmClient& llm,
                                 const PromptSet& prompts) {
  EncodedContext out = base;
  out.strategy = {StrategyKind::kSummarized, base.strategy.kind};
  PromptRequest req{prompts.rewrite, base.text, 512, 0.0};
  out.llm_cache_key = llm.cache_key(req);
  try {
    std::string rewritten(text::trim(llm.complete(req)));
    if (rewritten.empty()) {
      out.fallback = true;
    } else {
      out.text = std::move(rewritten);
    }
  } catch (const Error&) {
    out.fallback = true;
  }
  return out;
}

std::vector<std::string> parse_topics(std::string_view reply) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::string_view t = text::trim(cur);
    while (!t.empty() && (t.front() == '-' || t.front() == '*' || t.front() == ' ')) {
      t.remove_prefix(1);
    }
    std::size_t digits = 0;
    while (digits < t.size() && t[digits] >= '0' && t[digits] <= '9') ++digits;
    if (digits > 0 && digits < t.size() && (t[digits] == '.' || t[digits] == ')')) {
      t.remove_prefix(digits + 1);
    }
    std::string topic = text::collapse_whitespace(t);
    while (!topic.empty() && (topic.back() == '.' || topic.back() == ':')) topic.pop_back();
    if (!topic.empty()) out.push_back(std::move(topic));
    cur.clear();
  };
  for (char c : reply) {
    if (c == ',' || c == ';' || c == '\n') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

EncodedContext encode_node_descriptors(const KnowledgeGraph& graph, const NodeId& v,
                                       LlmClient& llm, const PromptSet& prompts,
                                       const DescriptorOptions& options) {
  const Node& node = graph.node(v);
  EncodedContext out;
  out.strategy = {StrategyKind::kNodeDescriptors, StrategyKind::kAdjacencyList};
  out.center = v;

  if (node.attribute(options.topic_source_attribute) == nullptr) {
    std::map<NodeId, std::vector<Edge>> sources;
    for (Edge& e : graph.incident_edges(v)) {
      const NodeId& other = e.head == v ? e.tail : e.head;
      if (graph.node(other).attribute(options.topic_source_attribute) != nullptr) {
        sources[other].push_back(std::move(e));
      }
    }
    std::map<std::string, std::string> topics;  // lowercase -> first spelling
    std::string keys;
    for (auto& [source, edges] : sources) {
      PromptRequest req{prompts.topics,
                        *graph.node(source).attribute(options.topic_source_attribute), 128,
                        0.0};
      keys += llm.cache_key(req);
      try {
        for (std::string& t : parse_topics(llm.complete(req))) {
          topics.emplace(text::to_lower(t), std::move(t));
        }
      } catch (const Error&) {
        out.fallback = true;
      }
      out.source_edges.insert(out.source_edges.end(), edges.begin(), edges.end());
    }
    if (!topics.empty()) {
      std::vector<std::string> list;
      for (auto& [key, t] : topics) list.push_back(std::move(t));
      std::string joined;
      for (const std::string& t : list) joined += (joined.empty() ? "" : ", ") + t;
      out.text = sentence(node.label + " has published on: " + joined);
      std::sort(out.source_edges.begin(), out.source_edges.end());
      out.llm_cache_key = sha256_hex(keys);
      return out;
    }
    out.source_edges.clear();
  }

  std::string rendered;
  for (const auto& [key, value] : node.attributes) {
    if (std::find(options.skip_attributes.begin(), options.skip_attributes.end(), key) !=
        options.skip_attributes.end()) {
      continue;
    }
    if (!rendered.empty()) rendered += ' ';
    rendered += text::terminate_sentence("The " + key + " of " + node.label + " is " + value);
  }
  if (rendered.empty()) {
    throw Error(ErrorCode::kNoDescribableContent, v.str());
  }
  out.text = std::move(rendered);
  return out;
}

}  // namespace kg2ft
