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

#include "kg2ft/qa.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <span>

#include "kg2ft/error.hpp"
#include "kg2ft/hash.hpp"
#include "kg2ft/rng.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {
namespace {

std::string conjoin_labels(const KnowledgeGraph& g, const std::vector<NodeId>& ids) {
  std::vector<std::string> labels;
  labels.reserve(ids.size());
  for (const NodeId& id : ids) labels.push_back(g.node(id).label);
  return text::join_conjunction(labels);
}

std::vector<RelationGroup> center_groups(const EncodedContext& ctx, Direction dir) {
  ContextSubgraph sub;
  sub.center = ctx.center;
  sub.edges = ctx.source_edges;
  std::sort(sub.edges.begin(), sub.edges.end());
  std::vector<RelationGroup> out;
  for (RelationGroup& g : relation_groups(sub)) {
    if (g.direction == dir) out.push_back(std::move(g));
  }
  return out;
}

// Names of every {slot} in tmpl, in order of first appearance.
std::vector<std::string> slot_names(std::string_view tmpl) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = tmpl.find('{', i)) != std::string_view::npos) {
    std::size_t close = tmpl.find('}', i);
    if (close == std::string_view::npos) break;
    std::string name(tmpl.substr(i + 1, close - i - 1));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    i = close + 1;
  }
  return out;
}

// Resolves {head}, {tail} and {head.<rel>} / {tail.<rel>} lookups against g.
// Returns nullopt when a lookup has no target.
std::optional<std::map<std::string, std::string>> resolve_slots(
    const KnowledgeGraph& g, std::string_view tmpl, const NodeId& head, const NodeId& tail) {
  std::map<std::string, std::string> slots;
  for (const std::string& name : slot_names(tmpl)) {
    if (name == "head") {
      slots[name] = g.node(head).label;
    } else if (name == "tail") {
      slots[name] = g.node(tail).label;
    } else if (name.starts_with("head.") || name.starts_with("tail.")) {
      const NodeId& base = name[0] == 'h' ? head : tail;
      std::string rel = canonical_relation(std::string_view(name).substr(5));
      std::vector<NodeId> targets = g.tails_of(base, rel);
      if (targets.empty()) return std::nullopt;
      slots[name] = conjoin_labels(g, targets);
    }
    // Unknown names are left for fill_template to reject.
  }
  return slots;
}

bool contains_sorted(const std::vector<Edge>& edges, const Edge& e) {
  return std::binary_search(edges.begin(), edges.end(), e);
}

}  // namespace

std::string_view to_string(TaskKind t) {
  switch (t) {
    case TaskKind::kFactRecall: return "fact";
    case TaskKind::kInverseFactRecall: return "inverse";
    case TaskKind::kMultiHop: return "multihop";
  }
  return "unknown";
}

std::string_view to_string(AnswerFormat f) {
  return f == AnswerFormat::kOpenEnded ? "open" : "mc";
}

TaskKind parse_task(std::string_view name) {
  if (name == "fact") return TaskKind::kFactRecall;
  if (name == "inverse") return TaskKind::kInverseFactRecall;
  if (name == "multihop") return TaskKind::kMultiHop;
  throw Error(ErrorCode::kInvalidConfig, "unknown task '" + std::string(name) + "'");
}

AnswerFormat parse_format(std::string_view name) {
  if (name == "open") return AnswerFormat::kOpenEnded;
  if (name == "mc") return AnswerFormat::kMultipleChoice;
  throw Error(ErrorCode::kInvalidConfig, "unknown format '" + std::string(name) + "'");
}

bool EdgeSplit::is_test(const Edge& e) const { return contains_sorted(test_edges, e); }
bool EdgeSplit::is_train(const Edge& e) const { return contains_sorted(train_edges, e); }

EdgeSplit split_edges(const KnowledgeGraph& graph, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidRatio, "split ratio must be in (0, 1)");
  }
  std::vector<Edge> edges = graph.edges_sorted();
  DeterministicRng rng(seed);
  rng.shuffle(std::span<Edge>(edges));
  // The epsilon absorbs binary rounding, e.g. 0.7 * 100 = 69.999...
  auto n_train = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(edges.size()) + 1e-9));
  EdgeSplit split;
  split.ratio = ratio;
  split.seed = seed;
  split.train_edges.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_edges.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train), edges.end());
  std::sort(split.train_edges.begin(), split.train_edges.end());
  std::sort(split.test_edges.begin(), split.test_edges.end());
  return split;
}

std::vector<QASample> gen_fact_qa(const KnowledgeGraph& graph, const EncodedContext& ctx,
                                  const TemplateSet& templates) {
  std::vector<QASample> out;
  for (RelationGroup& g : center_groups(ctx, Direction::kIncoming)) {
    const RelationType& rel = templates.at(g.relation);
    QASample s;
    s.task = TaskKind::kFactRecall;
    s.question_text = text::fill_template(rel.question_forward,
                                          {{"tail", graph.node(g.anchor).label}});
    s.answer_text = conjoin_labels(graph, g.nodes);
    s.relation = g.relation;
    s.role = AnswerRole::kHeads;
    s.anchor = g.anchor;
    s.subject = g.anchor;
    s.answer_nodes = std::move(g.nodes);
    s.source_edges = std::move(g.edges);
    s.center = ctx.center;
    s.partition_index = ctx.partition_index;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<QASample> gen_inverse_qa(const KnowledgeGraph& graph, const EncodedContext& ctx,
                                     const TemplateSet& templates) {
  std::vector<QASample> out;
  for (RelationGroup& g : center_groups(ctx, Direction::kOutgoing)) {
    const RelationType& rel = templates.at(g.relation);
    QASample s;
    s.task = TaskKind::kInverseFactRecall;
    s.question_text = text::fill_template(rel.question_inverse,
                                          {{"head", graph.node(g.anchor).label}});
    s.answer_text = conjoin_labels(graph, g.nodes);
    s.relation = g.relation;
    s.role = AnswerRole::kTails;
    s.anchor = g.anchor;
    s.subject = g.anchor;
    s.answer_nodes = std::move(g.nodes);
    s.source_edges = std::move(g.edges);
    s.center = ctx.center;
    s.partition_index = ctx.partition_index;
    out.push_back(std::move(s));
  }
  return out;
}

bool within_two_hops(const KnowledgeGraph& g, const NodeId& a, const NodeId& b) {
  if (a == b) return true;
  std::vector<NodeId> na = g.neighbors(a);
  if (std::binary_search(na.begin(), na.end(), b)) return true;
  std::vector<NodeId> nb = g.neighbors(b);
  std::size_t i = 0, j = 0;
  while (i < na.size() && j < nb.size()) {
    if (na[i] == nb[j]) return true;
    if (na[i] < nb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

MultihopResult gen_multihop_qa(const KnowledgeGraph& full, const EdgeSplit& split,
                               const KnowledgeGraph& train, const TemplateSet& templates) {
  MultihopResult result;
  MultihopReport& rep = result.report;
  rep.test_edges = split.test_edges.size();

  // (head, relation) -> eligible held-out tails, for `tail` mode.
  std::map<std::pair<NodeId, std::string>, std::vector<Edge>> tail_groups;
  for (const Edge& e : split.test_edges) {
    if (!within_two_hops(train, e.head, e.tail)) {
      ++rep.skipped_disconnected;
      continue;
    }
    ++rep.eligible;
    const RelationType& rel = templates.at(e.relation);
    if (rel.multihop_answer == MultihopAnswer::kTail) {
      tail_groups[{e.head, e.relation}].push_back(e);
      continue;
    }
    std::vector<NodeId> co;
    for (NodeId& h : train.heads_of(e.relation, e.tail)) {
      if (h != e.head) co.push_back(std::move(h));
    }
    if (co.empty()) {
      ++rep.skipped_no_co_heads;
      continue;
    }
    auto slots = resolve_slots(train, rel.question_multihop, e.head, e.tail);
    if (!slots) {
      ++rep.skipped_missing_lookup;
      continue;
    }
    QASample s;
    s.task = TaskKind::kMultiHop;
    s.question_text = text::fill_template(rel.question_multihop, *slots);
    s.answer_text = conjoin_labels(full, co);
    s.relation = e.relation;
    s.role = AnswerRole::kCoHeads;
    s.anchor = e.tail;
    s.subject = e.head;
    s.answer_nodes = std::move(co);
    s.source_edges = {e};
    s.center = e.head;
    result.samples.push_back(std::move(s));
  }

  for (auto& [key, edges] : tail_groups) {
    const auto& [head, relation] = key;
    const RelationType& rel = templates.at(relation);
    auto slots = resolve_slots(train, rel.question_multihop, head, edges.front().tail);
    if (!slots) {
      rep.skipped_missing_lookup += edges.size();
      continue;
    }
    QASample s;
    s.task = TaskKind::kMultiHop;
    s.question_text = text::fill_template(rel.question_multihop, *slots);
    for (const Edge& e : edges) s.answer_nodes.push_back(e.tail);
    std::sort(s.answer_nodes.begin(), s.answer_nodes.end());
    s.answer_text = conjoin_labels(full, s.answer_nodes);
    s.relation = relation;
    s.role = AnswerRole::kTails;
    s.anchor = head;
    s.subject = head;
    s.source_edges = std::move(edges);
    s.center = head;
    result.samples.push_back(std::move(s));
  }

  std::stable_sort(result.samples.begin(), result.samples.end(),
                   [](const QASample& a, const QASample& b) {
                     return a.source_edges.front() < b.source_edges.front();
                   });
  rep.questions = result.samples.size();
  return result;
}

std::vector<NodeId> valid_answers(const KnowledgeGraph& g, const QASample& sample) {
  std::vector<NodeId> out;
  switch (sample.role) {
    case AnswerRole::kHeads:
    case AnswerRole::kCoHeads:
      out = g.heads_of(sample.relation, sample.anchor);
      break;
    case AnswerRole::kTails:
      out = g.tails_of(sample.anchor, sample.relation);
      break;
  }
  std::erase(out, sample.subject);
  return out;
}

DistractorPool::DistractorPool(const KnowledgeGraph& graph) {
  for (const Node* n : graph.nodes_sorted()) by_type_[n->node_type].push_back(n->id);
}

const std::vector<NodeId>& DistractorPool::of_type(const std::string& node_type) const {
  auto it = by_type_.find(node_type);
  return it == by_type_.end() ? empty_ : it->second;
}

std::uint64_t question_seed(std::uint64_t seed, const QASample& sample) {
  std::string key;
  key += to_string(sample.task);
  key += '\x1f';
  key += sample.relation;
  key += '\x1f';
  key += sample.anchor.str();
  key += '\x1f';
  key += sample.subject.str();
  return derive_seed(seed, key);
}

QASample to_multiple_choice(const QASample& sample, const KnowledgeGraph& full,
                            const DistractorPool& pool, std::uint64_t seed,
                            int n_distractors) {
  if (sample.answer_nodes.empty()) {
    throw Error(ErrorCode::kInvalidRequest, "sample has no answer node");
  }
  const NodeId& correct = sample.answer_nodes.front();
  const Node& correct_node = full.node(correct);

  std::set<NodeId> excluded;
  for (NodeId& v : valid_answers(full, sample)) excluded.insert(std::move(v));
  excluded.insert(sample.answer_nodes.begin(), sample.answer_nodes.end());
  excluded.insert(sample.anchor);
  excluded.insert(sample.subject);

  std::set<std::string> seen_labels{text::normalize_answer(correct_node.label)};
  auto eligible = [&](const NodeId& id) {
    return excluded.count(id) == 0 &&
           seen_labels.count(text::normalize_answer(full.node(id).label)) == 0;
  };

  const std::vector<NodeId>& candidates = pool.of_type(correct_node.node_type);
  const auto needed = static_cast<std::size_t>(n_distractors);
  DeterministicRng rng(seed);
  std::vector<NodeId> chosen;
  // Rejection sampling is cheap on large pools; small or crowded pools fall
  // through to enumeration.
  for (std::size_t attempt = 0;
       chosen.size() < needed && attempt < 32 * needed && !candidates.empty(); ++attempt) {
    const NodeId& pick = candidates[rng.below(candidates.size())];
    if (!eligible(pick)) continue;
    chosen.push_back(pick);
    seen_labels.insert(text::normalize_answer(full.node(pick).label));
  }
  if (chosen.size() < needed) {
    std::vector<NodeId> rest;
    for (const NodeId& id : candidates) {
      if (eligible(id)) rest.push_back(id);
    }
    rng.shuffle(std::span<NodeId>(rest));
    for (const NodeId& id : rest) {
      if (chosen.size() == needed) break;
      if (!eligible(id)) continue;  // label taken by an earlier pick in `rest`
      chosen.push_back(id);
      seen_labels.insert(text::normalize_answer(full.node(id).label));
    }
  }
  if (chosen.size() < needed) {
    throw Error(ErrorCode::kInsufficientDistractorPool,
                "only " + std::to_string(chosen.size()) + " eligible '" +
                    correct_node.node_type + "' distractors for: " + sample.question_text);
  }

  std::vector<std::pair<std::string, bool>> options;
  options.emplace_back(correct_node.label, true);
  for (const NodeId& id : chosen) options.emplace_back(full.node(id).label, false);
  rng.shuffle(std::span<std::pair<std::string, bool>>(options));

  QASample mc = sample;
  mc.format = AnswerFormat::kMultipleChoice;
  mc.answer_text = correct_node.label;
  mc.mc_seed = seed;
  mc.options.clear();
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (options[i].second) mc.correct_index = static_cast<int>(i);
    mc.options.push_back(std::move(options[i].first));
  }
  return mc;
}

QASample paraphrase_question(const QASample& sample, LlmClient& llm, const PromptSet& prompts) {
  QASample out = sample;
  try {
    std::string reworded(text::trim(llm.complete({prompts.paraphrase, sample.question_text, 128, 0.0})));
    if (reworded.empty()) {
      out.paraphrase_fallback = true;
    } else {
      out.question_text = std::move(reworded);
    }
  } catch (const Error&) {
    out.paraphrase_fallback = true;
  }
  return out;
}

}  // namespace kg2ft
