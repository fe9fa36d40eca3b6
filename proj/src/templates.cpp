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

#include "kg2ft/templates.hpp"

#include <fstream>
#include <iterator>

#include "json.hpp"

#include "kg2ft/error.hpp"
#include "kg2ft/graph.hpp"
#include "kg2ft/hash.hpp"
#include "kg2ft/resources.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {
namespace {

using nlohmann::json;

void require_slot(const RelationType& r, const std::string& field,
                  const std::string& tmpl, const char* slot, std::size_t expected) {
  if (text::count_slot(tmpl, slot) != expected) {
    throw Error(ErrorCode::kInvalidTemplate,
                r.name + "." + field + " must contain {" + slot + "} exactly " +
                    std::to_string(expected) + " time(s)");
  }
}

}  // namespace

void RelationType::validate() const {
  if (name.empty()) throw Error(ErrorCode::kInvalidTemplate, "relation without a name");
  require_slot(*this, "forward", forward_phrase, "head", 1);
  require_slot(*this, "forward", forward_phrase, "tail", 1);
  require_slot(*this, "inverse", inverse_phrase, "head", 1);
  require_slot(*this, "inverse", inverse_phrase, "tail", 1);
  require_slot(*this, "question_forward", question_forward, "tail", 1);
  require_slot(*this, "question_forward", question_forward, "head", 0);
  require_slot(*this, "question_inverse", question_inverse, "head", 1);
  require_slot(*this, "question_inverse", question_inverse, "tail", 0);
  require_slot(*this, "question_multihop", question_multihop, "head", 1);
  if (multihop_answer == MultihopAnswer::kTail) {
    // The tail is the answer; it cannot appear in the question.
    require_slot(*this, "question_multihop", question_multihop, "tail", 0);
  }
}

TemplateSet TemplateSet::parse(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kInvalidTemplate, "template file is not a JSON object");
  }
  if (doc.value("version", 0) != 1) {
    throw Error(ErrorCode::kInvalidTemplate, "unsupported template file version");
  }
  auto rels = doc.find("relations");
  if (rels == doc.end() || !rels->is_object()) {
    throw Error(ErrorCode::kInvalidTemplate, "template file has no 'relations' object");
  }
  TemplateSet set;
  for (auto it = rels->begin(); it != rels->end(); ++it) {
    const json& r = it.value();
    auto field = [&](const char* key) {
      auto f = r.find(key);
      if (f == r.end() || !f->is_string()) {
        throw Error(ErrorCode::kInvalidTemplate,
                    it.key() + ": missing string field '" + key + "'");
      }
      return f->get<std::string>();
    };
    RelationType rt;
    rt.name = canonical_relation(it.key());
    rt.forward_phrase = field("forward");
    rt.inverse_phrase = field("inverse");
    rt.question_forward = field("question_forward");
    rt.question_inverse = field("question_inverse");
    rt.question_multihop = field("question_multihop");
    std::string mode = r.value("multihop_answer", "tail");
    if (mode == "tail") {
      rt.multihop_answer = MultihopAnswer::kTail;
    } else if (mode == "co_heads") {
      rt.multihop_answer = MultihopAnswer::kCoHeads;
    } else {
      throw Error(ErrorCode::kInvalidTemplate, it.key() + ": unknown multihop_answer '" + mode + "'");
    }
    set.add(std::move(rt));
  }
  set.source_ = std::string(json_text);
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(body);
}

TemplateSet TemplateSet::builtin() { return parse(resources::default_templates()); }

void TemplateSet::add(RelationType relation) {
  relation.validate();
  source_.clear();
  std::string key = relation.name;
  relations_.insert_or_assign(std::move(key), std::move(relation));
}

const RelationType* TemplateSet::find(std::string_view relation) const {
  auto it = relations_.find(relation);
  return it == relations_.end() ? nullptr : &it->second;
}

const RelationType& TemplateSet::at(std::string_view relation) const {
  const RelationType* r = find(relation);
  if (r == nullptr) throw Error(ErrorCode::kMissingTemplate, std::string(relation));
  return *r;
}

std::string TemplateSet::content_hash() const {
  if (!source_.empty()) return sha256_hex(source_);
  json doc = json::object();
  for (const auto& [name, r] : relations_) {
    doc[name] = {r.forward_phrase, r.inverse_phrase, r.question_forward,
                 r.question_inverse, r.question_multihop,
                 r.multihop_answer == MultihopAnswer::kTail ? "tail" : "co_heads"};
  }
  return sha256_hex(doc.dump());
}

}  // namespace kg2ft
