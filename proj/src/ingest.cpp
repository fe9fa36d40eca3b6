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

#include "kg2ft/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <unordered_set>

#include "json.hpp"

#include "kg2ft/error.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

void ensure_node(KnowledgeGraph& g, const std::string& id, std::string label,
                 const std::string& type) {
  NodeId nid(id);
  if (g.contains(nid)) return;
  g.add_node(Node{std::move(nid), std::move(label), type, {}});
}

std::optional<std::string> optional_string(const json& rec, const char* key,
                                           std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw Error(ErrorCode::kMalformedRecord,
              std::string("field '") + key + "' must be a string", line);
}

std::vector<std::string> string_array(const json& rec, const char* key,
                                      std::size_t line) {
  std::vector<std::string> out;
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return out;
  if (!it->is_array()) {
    throw Error(ErrorCode::kMalformedRecord,
                std::string("field '") + key + "' must be an array", line);
  }
  for (const json& v : *it) {
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      out.push_back(std::to_string(v.get<long long>()));
    } else {
      throw Error(ErrorCode::kMalformedRecord,
                  std::string("field '") + key + "' must hold strings", line);
    }
  }
  return out;
}

bool blank(const std::optional<std::string>& s) {
  return !s || text::trim(*s).empty();
}

}  // namespace

std::string triple_node_id(std::string_view label) {
  return text::collapse_whitespace(label);
}

IngestResult load_triples(const TripleFileSpec& spec) {
  std::ifstream in = open_input(spec.path);
  return load_triples(in, spec);
}

IngestResult load_triples(std::istream& in, const TripleFileSpec& spec) {
  std::set<int> columns{spec.head_column, spec.relation_column, spec.tail_column};
  if (columns.size() != 3 || *columns.begin() < 0) {
    throw Error(ErrorCode::kInvalidConfig, "triple columns must be distinct and >= 0");
  }
  std::optional<std::set<std::string>> allow;
  if (spec.relation_allow_list) {
    allow.emplace();
    for (const auto& r : *spec.relation_allow_list) allow->insert(canonical_relation(r));
  }
  const int required = *columns.rbegin() + 1;

  IngestResult result;
  KnowledgeGraph& g = result.graph;
  IngestReport& rep = result.report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (text::trim(line).empty() || line[0] == '#') continue;
    ++rep.rows_read;
    std::vector<std::string> cols = text::split(line, spec.delimiter);
    auto malformed = [&](const std::string& why) {
      if (!spec.skip_malformed) throw Error(ErrorCode::kMalformedRow, why, line_no);
      ++rep.rows_malformed;
    };
    if (static_cast<int>(cols.size()) < required) {
      malformed("expected at least " + std::to_string(required) + " columns, got " +
                std::to_string(cols.size()));
      continue;
    }
    const std::string& head_label = cols[spec.head_column];
    const std::string& tail_label = cols[spec.tail_column];
    std::string relation = canonical_relation(cols[spec.relation_column]);
    std::string head_id = triple_node_id(head_label);
    std::string tail_id = triple_node_id(tail_label);
    if (head_id.empty() || tail_id.empty() || relation.empty() ||
        text::has_control_chars(head_id) || text::has_control_chars(tail_id)) {
      malformed("empty or invalid field");
      continue;
    }
    if (allow && allow->count(relation) == 0) {
      ++rep.rows_dropped;
      continue;
    }
    if (head_id == tail_id) {
      ++rep.rows_dropped;
      ++rep.self_loops;
      continue;
    }
    auto type_at = [&](int col) {
      if (col >= 0 && col < static_cast<int>(cols.size())) {
        std::string t = text::collapse_whitespace(cols[col]);
        if (!t.empty()) return t;
      }
      return spec.default_node_type;
    };
    g.register_relation(relation);
    ensure_node(g, head_id, head_label, type_at(spec.head_type_column));
    ensure_node(g, tail_id, tail_label, type_at(spec.tail_type_column));
    ++rep.rows_kept;
    if (!g.add_edge(Edge{NodeId(head_id), relation, NodeId(tail_id)})) {
      ++rep.duplicates;
    }
  }
  if (rep.rows_read == 0) throw Error(ErrorCode::kEmptyFile, "no triple rows");
  return result;
}

PaperRecord parse_paper_record(std::string_view line, std::size_t line_number) {
  json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (rec.is_discarded() || !rec.is_object()) {
    throw Error(ErrorCode::kMalformedRecord, "not a JSON object", line_number);
  }
  PaperRecord p;
  auto id = optional_string(rec, "id", line_number);
  if (blank(id)) throw Error(ErrorCode::kMalformedRecord, "missing id", line_number);
  p.paper_id = text::collapse_whitespace(*id);
  p.title = optional_string(rec, "title", line_number).value_or("");
  p.abstract = optional_string(rec, "abstract", line_number);
  p.venue = optional_string(rec, "venue", line_number);
  p.year = optional_string(rec, "year", line_number);
  p.authors = string_array(rec, "authors", line_number);
  p.references = string_array(rec, "references", line_number);
  return p;
}

IngestResult load_papers(const std::filesystem::path& path, int min_authors) {
  std::ifstream in = open_input(path);
  return load_papers(in, min_authors);
}

IngestResult load_papers(std::istream& in, int min_authors) {
  IngestResult result;
  KnowledgeGraph& g = result.graph;
  IngestReport& rep = result.report;
  g.register_relation(kAuthoredRelation);
  g.register_relation(kPublishedInRelation);
  g.register_relation(kCitesRelation);

  std::vector<PaperRecord> kept;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (text::trim(line).empty()) continue;
    ++rep.rows_read;
    PaperRecord p = parse_paper_record(line, line_no);

    std::vector<std::string> authors;
    for (const auto& a : p.authors) {
      std::string name = text::collapse_whitespace(a);
      if (!name.empty() && std::find(authors.begin(), authors.end(), name) == authors.end()) {
        authors.push_back(std::move(name));
      }
    }
    p.authors = std::move(authors);
    if (text::trim(p.title).empty() || blank(p.abstract) || blank(p.venue) ||
        static_cast<int>(p.authors.size()) < min_authors ||
        !seen_ids.insert(p.paper_id).second) {
      ++rep.rows_dropped;
      continue;
    }
    ++rep.rows_kept;
    kept.push_back(std::move(p));
  }
  if (rep.rows_read == 0) throw Error(ErrorCode::kEmptyFile, "no paper records");

  for (const PaperRecord& p : kept) {
    Attributes attrs{{"abstract", *p.abstract}};
    if (!blank(p.year)) attrs.emplace_back("year", text::collapse_whitespace(*p.year));
    g.add_node(Node{NodeId("paper:" + p.paper_id), text::collapse_whitespace(p.title),
                    "paper", std::move(attrs)});
  }
  for (const PaperRecord& p : kept) {
    NodeId paper("paper:" + p.paper_id);
    for (const auto& name : p.authors) {
      std::string id = "author:" + name;
      ensure_node(g, id, name, "author");
      g.add_edge(Edge{NodeId(id), kAuthoredRelation, paper});
    }
    std::string venue = text::collapse_whitespace(*p.venue);
    ensure_node(g, "venue:" + venue, venue, "venue");
    g.add_edge(Edge{paper, kPublishedInRelation, NodeId("venue:" + venue)});
    for (const auto& ref : p.references) {
      NodeId target("paper:" + text::collapse_whitespace(ref));
      // Citations leaving the filtered set are dropped, not stubbed.
      if (target == paper || !g.contains(target)) continue;
      g.add_edge(Edge{paper, kCitesRelation, target});
    }
  }
  return result;
}

}  // namespace kg2ft
