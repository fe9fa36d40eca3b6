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
#include <string>
#include <string_view>

#include "kg2ft/graph.hpp"

// graph.kgz: the canonical on-disk graph.
//
// The body is UTF-8 text, one JSON array per line, no insignificant
// whitespace:
//
//   {"format":"kg2ft-graph","version":1,"relations":R,"nodes":N,"edges":M}
//   ["relation","<name>"]                          R lines, sorted
//   ["node","<id>","<label>","<type>",[["k","v"],...]]   N lines, sorted by id
//   ["edge","<head>","<relation>","<tail>"]        M lines, sorted by
//                                                   (relation, head, tail)
//
// The file is the body gzip-compressed with zlib (level 9, mtime 0), so equal
// graphs produce equal bytes. Uncompressed bodies are also accepted on load.
namespace kg2ft {

inline constexpr int kGraphFormatVersion = 1;

std::string serialize_graph(const KnowledgeGraph& graph);
KnowledgeGraph deserialize_graph(std::string_view body);

// SHA-256 of the canonical body; independent of insertion order.
std::string graph_content_hash(const KnowledgeGraph& graph);

void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& path);
KnowledgeGraph load_graph(const std::filesystem::path& path);

// gzip helpers, exposed for tests.
std::string gzip_compress(std::string_view data);
std::string gzip_decompress(std::string_view data);

}  // namespace kg2ft
