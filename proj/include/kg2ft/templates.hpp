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
#include <map>
#include <string>
#include <string_view>

namespace kg2ft {

enum class MultihopAnswer {
  kTail,     // answer with the held-out tail(s)
  kCoHeads,  // answer with the other heads of the held-out tail
};

// Verbalization and question templates for one relation.
//
//   forward            "{head} may treat {tail}"          one edge, or one
//                                                         head with many tails
//   inverse            "{tail} is treated with {head}"    one tail, many heads
//   question_forward   "What may treat {tail}?"           asks for heads
//   question_inverse   "What can be treated with {head}?" asks for tails
//   question_multihop  "...{head}..."                     held-out edge; may
//                      use {tail} (co_heads only) and {tail.<relation>} /
//                      {head.<relation>} neighbour lookups
struct RelationType {
  std::string name;
  std::string forward_phrase;
  std::string inverse_phrase;
  std::string question_forward;
  std::string question_inverse;
  std::string question_multihop;
  MultihopAnswer multihop_answer = MultihopAnswer::kTail;

  // Throws InvalidTemplate.
  void validate() const;
};

class TemplateSet {
 public:
  // JSON: {"version":1,"relations":{"<name>":{"forward":...,...}}}.
  // Relation names are canonicalized. Throws InvalidTemplate.
  static TemplateSet parse(std::string_view json_text);
  static TemplateSet load(const std::filesystem::path& path);
  // The shipped UMLS- and DBLP-style defaults.
  static TemplateSet builtin();

  void add(RelationType relation);

  // Throws MissingTemplate.
  const RelationType& at(std::string_view relation) const;
  const RelationType* find(std::string_view relation) const;
  const std::map<std::string, RelationType, std::less<>>& relations() const {
    return relations_;
  }

  // SHA-256 of the source text (or of a canonical dump when built in code).
  std::string content_hash() const;

 private:
  std::map<std::string, RelationType, std::less<>> relations_;
  std::string source_;
};

}  // namespace kg2ft
