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

#include "kg2ft/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

#include "kg2ft/error.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {

NodeId::NodeId(std::string value) : value_(std::move(value)) {
  if (value_.empty()) throw Error(ErrorCode::kInvalidId, "empty node id");
  if (text::has_control_chars(value_)) {
    throw Error(ErrorCode::kInvalidId, "control character in node id");
  }
}

const std::string* Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool operator<(const Edge& a, const Edge& b) {
  return std::tie(a.relation, a.head, a.tail) <
         std::tie(b.relation, b.head, b.tail);
}

std::size_t EdgeHash::operator()(const Edge& e) const noexcept {
  std::size_t h = std::hash<std::string>{}(e.head.str());
  h = h * 1000003u ^ std::hash<std::string>{}(e.relation);
  h = h * 1000003u ^ std::hash<std::string>{}(e.tail.str());
  return h;
}

std::string canonical_relation(std::string_view name) {
  std::string out = text::to_lower(text::collapse_whitespace(name));
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

std::string_view to_string(Direction d) {
  return d == Direction::kOutgoing ? "outgoing" : "incoming";
}

void KnowledgeGraph::register_relation(std::string_view name) {
  std::string canon = canonical_relation(name);
  if (canon.empty()) {
    throw Error(ErrorCode::kUnknownRelation, "empty relation name");
  }
  relations_.insert(std::move(canon));
}

bool KnowledgeGraph::has_relation(std::string_view name) const {
  return relations_.count(std::string(name)) != 0;
}

void KnowledgeGraph::add_node(Node node) {
  if (node.id.str().empty()) throw Error(ErrorCode::kInvalidId, "empty node id");
  if (node.label.empty()) {
    throw Error(ErrorCode::kInvalidId, "empty label for node '" + node.id.str() + "'");
  }
  for (std::size_t i = 0; i < node.attributes.size(); ++i) {
    for (std::size_t j = i + 1; j < node.attributes.size(); ++j) {
      if (node.attributes[i].first == node.attributes[j].first) {
        throw Error(ErrorCode::kInvalidId,
                    "duplicate attribute '" + node.attributes[i].first + "'");
      }
    }
  }
  if (index_.count(node.id) != 0) {
    throw Error(ErrorCode::kDuplicateNode, node.id.str());
  }
  auto idx = static_cast<std::uint32_t>(nodes_.size());
  index_.emplace(node.id, idx);
  nodes_.push_back(std::move(node));
  out_.emplace_back();
  in_.emplace_back();
}

bool KnowledgeGraph::add_edge(Edge edge) {
  auto h = index_.find(edge.head);
  if (h == index_.end()) throw Error(ErrorCode::kUnknownNode, edge.head.str());
  auto t = index_.find(edge.tail);
  if (t == index_.end()) throw Error(ErrorCode::kUnknownNode, edge.tail.str());
  if (!has_relation(edge.relation)) {
    throw Error(ErrorCode::kUnknownRelation, edge.relation);
  }
  if (edge.head == edge.tail) throw Error(ErrorCode::kSelfLoop, edge.head.str());
  if (edge_set_.count(edge) != 0) return false;
  auto idx = static_cast<std::uint32_t>(edges_.size());
  out_[h->second].push_back(idx);
  in_[t->second].push_back(idx);
  edge_set_.insert(edge);
  edges_.push_back(std::move(edge));
  return true;
}

std::uint32_t KnowledgeGraph::index_of(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kUnknownNode, id.str());
  return it->second;
}

const Node* KnowledgeGraph::find_node(const NodeId& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

const Node& KnowledgeGraph::node(const NodeId& id) const {
  return nodes_[index_of(id)];
}

std::vector<const Node*> KnowledgeGraph::nodes_sorted() const {
  std::vector<const Node*> out;
  out.reserve(nodes_.size());
  for (const Node& n : nodes_) out.push_back(&n);
  std::sort(out.begin(), out.end(),
            [](const Node* a, const Node* b) { return a->id < b->id; });
  return out;
}

std::vector<Edge> KnowledgeGraph::edges_sorted() const {
  std::vector<Edge> out(edges_.begin(), edges_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> KnowledgeGraph::neighbors(const NodeId& v) const {
  std::uint32_t i = index_of(v);
  std::vector<NodeId> out;
  for (std::uint32_t e : out_[i]) out.push_back(edges_[e].tail);
  for (std::uint32_t e : in_[i]) out.push_back(edges_[e].head);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NodeId> KnowledgeGraph::heads_of(std::string_view relation,
                                             const NodeId& tail) const {
  std::vector<NodeId> out;
  auto it = index_.find(tail);
  if (it == index_.end()) return out;
  for (std::uint32_t e : in_[it->second]) {
    if (edges_[e].relation == relation) out.push_back(edges_[e].head);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> KnowledgeGraph::tails_of(const NodeId& head,
                                             std::string_view relation) const {
  std::vector<NodeId> out;
  auto it = index_.find(head);
  if (it == index_.end()) return out;
  for (std::uint32_t e : out_[it->second]) {
    if (edges_[e].relation == relation) out.push_back(edges_[e].tail);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> KnowledgeGraph::incident_edges(const NodeId& v) const {
  std::uint32_t i = index_of(v);
  std::vector<Edge> out;
  for (std::uint32_t e : out_[i]) out.push_back(edges_[e]);
  for (std::uint32_t e : in_[i]) out.push_back(edges_[e]);
  return out;
}

ContextSubgraph KnowledgeGraph::k_hop_context(const NodeId& v, int k) const {
  if (k < 0) throw Error(ErrorCode::kInvalidBudget, "k must be >= 0");
  std::uint32_t start = index_of(v);

  ContextSubgraph ctx;
  ctx.center = v;
  ctx.k = k;

  // Nodes at distance < k contribute all their incident edges; the other
  // endpoint is then at distance <= k by construction.
  std::unordered_map<std::uint32_t, int> dist{{start, 0}};
  std::deque<std::uint32_t> queue{start};
  std::vector<std::uint32_t> edge_ids;
  while (!queue.empty()) {
    std::uint32_t u = queue.front();
    queue.pop_front();
    int du = dist[u];
    if (du >= k) continue;
    auto visit = [&](std::uint32_t e, std::uint32_t w) {
      edge_ids.push_back(e);
      if (dist.emplace(w, du + 1).second) queue.push_back(w);
    };
    for (std::uint32_t e : out_[u]) visit(e, index_.at(edges_[e].tail));
    for (std::uint32_t e : in_[u]) visit(e, index_.at(edges_[e].head));
  }
  std::sort(edge_ids.begin(), edge_ids.end());
  edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());

  ctx.edges.reserve(edge_ids.size());
  for (std::uint32_t e : edge_ids) ctx.edges.push_back(edges_[e]);
  std::sort(ctx.edges.begin(), ctx.edges.end());

  ctx.nodes.push_back(v);
  for (const Edge& e : ctx.edges) {
    ctx.nodes.push_back(e.head);
    ctx.nodes.push_back(e.tail);
  }
  std::sort(ctx.nodes.begin(), ctx.nodes.end());
  ctx.nodes.erase(std::unique(ctx.nodes.begin(), ctx.nodes.end()), ctx.nodes.end());
  return ctx;
}

KnowledgeGraph KnowledgeGraph::with_edges(std::span<const Edge> edges) const {
  KnowledgeGraph g;
  g.relations_ = relations_;
  for (const Node& n : nodes_) g.add_node(n);
  for (const Edge& e : edges) {
    if (!has_edge(e)) {
      throw Error(ErrorCode::kUnknownNode,
                  "edge not in source graph: " + e.head.str() + " " + e.relation +
                      " " + e.tail.str());
    }
    g.add_edge(e);
  }
  return g;
}

std::vector<RelationGroup> relation_groups(const ContextSubgraph& ctx) {
  // Key: (relation, direction) so iteration order is relation name, then
  // outgoing before incoming.
  std::map<std::pair<std::string, Direction>, RelationGroup> groups;
  for (const Edge& e : ctx.edges) {
    Direction dir;
    const NodeId* other;
    if (e.head == ctx.center) {
      dir = Direction::kOutgoing;
      other = &e.tail;
    } else if (e.tail == ctx.center) {
      dir = Direction::kIncoming;
      other = &e.head;
    } else {
      continue;
    }
    auto& g = groups[{e.relation, dir}];
    g.direction = dir;
    g.relation = e.relation;
    g.anchor = ctx.center;
    g.nodes.push_back(*other);
    g.edges.push_back(e);
  }
  std::vector<RelationGroup> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) {
    std::vector<std::size_t> order(g.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return g.nodes[a] < g.nodes[b]; });
    RelationGroup sorted{g.direction, g.relation, g.anchor, {}, {}};
    for (std::size_t i : order) {
      sorted.nodes.push_back(g.nodes[i]);
      sorted.edges.push_back(g.edges[i]);
    }
    out.push_back(std::move(sorted));
  }
  return out;
}

std::vector<RelationGroup> peripheral_groups(const ContextSubgraph& ctx) {
  std::map<std::pair<NodeId, std::string>, RelationGroup> groups;
  for (const Edge& e : ctx.edges) {
    if (e.head == ctx.center || e.tail == ctx.center) continue;
    auto& g = groups[{e.head, e.relation}];
    g.direction = Direction::kOutgoing;
    g.relation = e.relation;
    g.anchor = e.head;
    g.nodes.push_back(e.tail);
    g.edges.push_back(e);
  }
  std::vector<RelationGroup> out;
  out.reserve(groups.size());
  // ctx.edges is sorted by (relation, head, tail), so within one
  // (head, relation) group the tails are already ascending.
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

}  // namespace kg2ft
