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

#include "kg2ft/partition.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kg2ft/error.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {
namespace {

struct Chunk {
  std::vector<NodeId> nodes;  // nodes the chunk needs besides the center
  std::vector<Edge> edges;
};

void append_chunks(const RelationGroup& g, std::size_t cap, bool include_anchor,
                   std::vector<Chunk>& out) {
  for (std::size_t start = 0; start < g.nodes.size(); start += cap) {
    std::size_t end = std::min(g.nodes.size(), start + cap);
    Chunk c;
    if (include_anchor) c.nodes.push_back(g.anchor);
    c.nodes.insert(c.nodes.end(), g.nodes.begin() + start, g.nodes.begin() + end);
    c.edges.assign(g.edges.begin() + start, g.edges.begin() + end);
    out.push_back(std::move(c));
  }
}

bool has_peripheral_edges(const ContextSubgraph& ctx) {
  return std::any_of(ctx.edges.begin(), ctx.edges.end(), [&](const Edge& e) {
    return e.head != ctx.center && e.tail != ctx.center;
  });
}

Partition finish(const NodeId& center, std::vector<Edge> edges, std::size_t nodes) {
  std::sort(edges.begin(), edges.end());
  return Partition{center, std::move(edges), nodes, false};
}

ContextSubgraph as_context(const Partition& p, int k) {
  ContextSubgraph ctx;
  ctx.center = p.center;
  ctx.k = k;
  ctx.edges = p.edges;
  ctx.nodes.push_back(p.center);
  for (const Edge& e : p.edges) {
    ctx.nodes.push_back(e.head);
    ctx.nodes.push_back(e.tail);
  }
  std::sort(ctx.nodes.begin(), ctx.nodes.end());
  ctx.nodes.erase(std::unique(ctx.nodes.begin(), ctx.nodes.end()), ctx.nodes.end());
  return ctx;
}

}  // namespace

void TokenBudget::validate() const {
  if (t_max < kMinTMax) {
    throw Error(ErrorCode::kInvalidBudget,
                "t_max must be >= " + std::to_string(kMinTMax));
  }
  if (!(chars_per_token > 0.0)) {
    throw Error(ErrorCode::kInvalidBudget, "chars_per_token must be positive");
  }
}

std::size_t estimate_tokens(std::string_view text, double chars_per_token) {
  std::size_t chars = text::utf8_length(text);
  return static_cast<std::size_t>(std::ceil(static_cast<double>(chars) / chars_per_token));
}

TokenEstimator char_ratio_estimator(double chars_per_token) {
  return [chars_per_token](std::string_view text) {
    return estimate_tokens(text, chars_per_token);
  };
}

std::vector<Partition> partition_context(const ContextSubgraph& ctx, int n_max) {
  if (n_max < 2) throw Error(ErrorCode::kInvalidBudget, "n_max must be >= 2");
  const bool peripheral = has_peripheral_edges(ctx);
  if (peripheral && n_max < 3) {
    throw Error(ErrorCode::kInvalidBudget,
                "n_max must be >= 3 for contexts with edges not touching the center");
  }
  const auto cap = static_cast<std::size_t>(n_max);

  std::vector<Chunk> chunks;
  for (const RelationGroup& g : relation_groups(ctx)) append_chunks(g, cap - 1, false, chunks);
  if (peripheral) {
    for (const RelationGroup& g : peripheral_groups(ctx)) append_chunks(g, cap - 2, true, chunks);
  }

  std::vector<Partition> out;
  std::set<NodeId> nodes{ctx.center};
  std::vector<Edge> edges;
  for (Chunk& c : chunks) {
    std::size_t added = 0;
    for (const NodeId& n : c.nodes) added += nodes.count(n) == 0 ? 1 : 0;
    if (nodes.size() + added > cap && !edges.empty()) {
      out.push_back(finish(ctx.center, std::move(edges), nodes.size()));
      edges.clear();
      nodes = {ctx.center};
    }
    nodes.insert(c.nodes.begin(), c.nodes.end());
    edges.insert(edges.end(), c.edges.begin(), c.edges.end());
  }
  if (!edges.empty()) out.push_back(finish(ctx.center, std::move(edges), nodes.size()));
  return out;
}

std::vector<Partition> fit_to_budget(const ContextSubgraph& ctx, int n_max,
                                     const TokenBudget& budget,
                                     const PartitionMeasure& measure, int* rounds) {
  budget.validate();
  const int floor_n = has_peripheral_edges(ctx) ? 3 : 2;
  const auto limit = static_cast<std::size_t>(budget.t_max);
  int deepest = 0;

  std::vector<Partition> out;
  // Depth-first so sub-partitions replace their parent in place.
  auto refine = [&](auto& self, Partition p, int n, int depth) -> void {
    if (measure(p) <= limit) {
      out.push_back(std::move(p));
      return;
    }
    if (p.edges.size() == 1) {
      p.oversized = true;
      out.push_back(std::move(p));
      return;
    }
    deepest = std::max(deepest, depth + 1);
    if (n <= floor_n) {
      for (const Edge& e : p.edges) {
        Partition single{p.center, {e}, 0, false};
        std::set<NodeId> ns{p.center, e.head, e.tail};
        single.node_count = ns.size();
        self(self, std::move(single), n, depth + 1);
      }
      return;
    }
    int next = std::max(floor_n, n / 2);
    for (Partition& sub : partition_context(as_context(p, ctx.k), next)) {
      self(self, std::move(sub), next, depth + 1);
    }
  };
  for (Partition& p : partition_context(ctx, n_max)) refine(refine, std::move(p), n_max, 0);
  if (rounds != nullptr) *rounds = deepest;
  return out;
}

}  // namespace kg2ft
