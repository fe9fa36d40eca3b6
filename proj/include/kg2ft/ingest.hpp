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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kg2ft/graph.hpp"

namespace kg2ft {

// Counts are in rows (triple files) or records (paper files).
// rows_read == rows_kept + rows_dropped + rows_malformed.
struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_dropped = 0;
  std::size_t rows_malformed = 0;
  // Sub-counts: duplicates are kept rows that added nothing, self loops and
  // filtered relations are dropped rows.
  std::size_t duplicates = 0;
  std::size_t self_loops = 0;
};

struct IngestResult {
  KnowledgeGraph graph;
  IngestReport report;
};

// Delimited triple file. Columns beyond the three required ones may carry
// the head and tail node types.
struct TripleFileSpec {
  std::filesystem::path path;
  char delimiter = '\t';
  int head_column = 0;
  int relation_column = 1;
  int tail_column = 2;
  int head_type_column = 3;  // -1 disables
  int tail_type_column = 4;  // -1 disables
  std::optional<std::vector<std::string>> relation_allow_list;
  std::string default_node_type = "entity";
  // When false, a short row raises MalformedRow; when true it is counted.
  bool skip_malformed = false;
};

// Node id for a triple-file label: whitespace collapsed and trimmed.
std::string triple_node_id(std::string_view label);

IngestResult load_triples(const TripleFileSpec& spec);
IngestResult load_triples(std::istream& in, const TripleFileSpec& spec);

struct PaperRecord {
  std::string paper_id;
  std::string title;
  std::optional<std::string> abstract;
  std::optional<std::string> venue;
  std::optional<std::string> year;
  std::vector<std::string> authors;
  std::vector<std::string> references;
};

// Parses one JSON-lines record. Throws MalformedRecord.
PaperRecord parse_paper_record(std::string_view line, std::size_t line_number);

inline constexpr const char* kAuthoredRelation = "authored";
inline constexpr const char* kPublishedInRelation = "published_in";
inline constexpr const char* kCitesRelation = "cites";

IngestResult load_papers(const std::filesystem::path& path, int min_authors);
IngestResult load_papers(std::istream& in, int min_authors);

}  // namespace kg2ft
