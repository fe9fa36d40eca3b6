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
#include <functional>
#include <string_view>
#include <vector>

#include "kg2ft/graph.hpp"

namespace kg2ft {

inline constexpr int kDefaultTMax = 256;
inline constexpr double kDefaultCharsPerToken = 4.0;
inline constexpr int kDefaultNMax = 30;
inline constexpr int kMinTMax = 32;

struct TokenBudget {
  int t_max = kDefaultTMax;
  double chars_per_token = kDefaultCharsPerToken;

  // Throws InvalidBudget.
  void validate() const;
};

// ceil(code points / chars_per_token).
std::size_t estimate_tokens(std::string_view text,
                            double chars_per_token = kDefaultCharsPerToken);

// Pluggable so a real tokenizer can stand in for the character ratio.
using TokenEstimator = std::function<std::size_t(std::string_view)>;
TokenEstimator char_ratio_estimator(double chars_per_token);

struct Partition {
  NodeId center;
  std::vector<Edge> edges;  // canonical edge order
  std::size_t node_count = 0;  // distinct endpoints plus the center
  bool oversized = false;
};

// Greedy fill over center relation groups (then non-incident groups for
// k >= 2), splitting a group only when it alone exceeds the budget.
// Throws InvalidBudget when n_max < 2, or n_max < 3 and ctx has edges that
// do not touch the center.
std::vector<Partition> partition_context(const ContextSubgraph& ctx, int n_max);

// Worst-case rendered sample length, in tokens, of one partition.
using PartitionMeasure = std::function<std::size_t(const Partition&)>;

// partition_context, then any partition measuring above budget.t_max is
// re-partitioned with halved n_max until it fits. At the floor a multi-edge
// partition is split into single edges; a single edge still over budget is
// returned with `oversized` set. `rounds`, if given, receives the deepest
// number of re-partition rounds used.
std::vector<Partition> fit_to_budget(const ContextSubgraph& ctx, int n_max,
                                     const TokenBudget& budget,
                                     const PartitionMeasure& measure,
                                     int* rounds = nullptr);

}  // namespace kg2ft
