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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace kg2ft {

// Stable node identifier. Non-empty, no control characters. Ordering is
// plain byte-wise string ordering and is used for every canonical order.
class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::string value);

  const std::string& str() const noexcept { return value_; }

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  friend bool operator==(const NodeId&, const NodeId&) = default;

 private:
  std::string value_;
};

struct NodeIdHash {
  std::size_t operator()(const NodeId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

using Attributes = std::vector<std::pair<std::string, std::string>>;

struct Node {
  NodeId id;
  std::string label;
  std::string node_type;
  Attributes attributes;

  const std::string* attribute(std::string_view key) const;
};

struct Edge {
  NodeId head;
  std::string relation;
  NodeId tail;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Canonical edge order: (relation, head, tail).
bool operator<(const Edge& a, const Edge& b);

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept;
};

// Relation names are canonicalized: trimmed, lowercased, whitespace runs
// replaced by '_'. "may treat" and "may_treat" name the same relation.
std::string canonical_relation(std::string_view name);

// k-hop neighbourhood of `center`. Edges are sorted canonically; nodes are
// the sorted union of edge endpoints and the center.
struct ContextSubgraph {
  NodeId center;
  int k = 0;
  std::vector<Edge> edges;
  std::vector<NodeId> nodes;

  bool empty() const { return edges.empty(); }
};

enum class Direction { kOutgoing, kIncoming };

std::string_view to_string(Direction d);

// A set of edges sharing one fixed endpoint (`anchor`) and relation.
// For center groups the anchor is the context center; `nodes` are the
// opposite endpoints, sorted.
struct RelationGroup {
  Direction direction = Direction::kOutgoing;
  std::string relation;
  NodeId anchor;
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
};

class KnowledgeGraph {
 public:
  void register_relation(std::string_view name);
  bool has_relation(std::string_view name) const;
  const std::set<std::string>& relations() const { return relations_; }

  // Throws DuplicateNode.
  void add_node(Node node);

  // Returns false when the triple was already present (idempotent).
  // Throws UnknownNode, UnknownRelation, SelfLoop.
  bool add_edge(Edge edge);

  bool contains(const NodeId& id) const { return index_.count(id) != 0; }
  const Node* find_node(const NodeId& id) const;
  // Throws UnknownNode.
  const Node& node(const NodeId& id) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  // Insertion order.
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }

  std::vector<const Node*> nodes_sorted() const;
  std::vector<Edge> edges_sorted() const;

  bool has_edge(const Edge& e) const { return edge_set_.count(e) != 0; }

  // Sorted, deduplicated neighbours on the undirected view.
  std::vector<NodeId> neighbors(const NodeId& v) const;

  // Heads h with (h, relation, tail) present, sorted.
  std::vector<NodeId> heads_of(std::string_view relation, const NodeId& tail) const;
  // Tails t with (head, relation, t) present, sorted.
  std::vector<NodeId> tails_of(const NodeId& head, std::string_view relation) const;

  // All edges incident to v (either direction), in insertion order.
  std::vector<Edge> incident_edges(const NodeId& v) const;

  // Edges with both endpoints within undirected distance k of v and at least
  // one endpoint at distance < k. Throws UnknownNode, InvalidBudget (k < 0).
  ContextSubgraph k_hop_context(const NodeId& v, int k) const;

  // Same nodes and relations, restricted to `edges` (which must exist here).
  KnowledgeGraph with_edges(std::span<const Edge> edges) const;

 private:
  std::uint32_t index_of(const NodeId& id) const;

  std::set<std::string> relations_;
  std::vector<Node> nodes_;
  std::unordered_map<NodeId, std::uint32_t, NodeIdHash> index_;
  std::vector<Edge> edges_;
  std::unordered_set<Edge, EdgeHash> edge_set_;
  std::vector<std::vector<std::uint32_t>> out_;  // node -> edge indices
  std::vector<std::vector<std::uint32_t>> in_;
};

// Groups the center-incident edges of ctx by (direction, relation). Groups
// are sorted by relation name, outgoing before incoming; node lists by id.
std::vector<RelationGroup> relation_groups(const ContextSubgraph& ctx);

// Groups the edges of ctx that do not touch the center (k >= 2) by
// (head, relation), sorted by head then relation.
std::vector<RelationGroup> peripheral_groups(const ContextSubgraph& ctx);

}  // namespace kg2ft
