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

#include <gtest/gtest.h>

#include "kg2ft/error.hpp"
#include "kg2ft/templates.hpp"
#include "test_graphs.hpp"

namespace kg2ft {
namespace {

ErrorCode parse_code(std::string_view body) {
  try {
    TemplateSet::parse(body);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidConfig;
}

constexpr std::string_view kGood = R"({"version":1,"relations":{"May Treat":{
  "forward":"{head} may treat {tail}","inverse":"{tail} is treated with {head}",
  "question_forward":"What may treat {tail}?","question_inverse":"What can {head} treat?",
  "question_multihop":"What else could {head} treat?","multihop_answer":"tail"}}})";

TEST(Templates, BuiltinCoversShippedRelations) {
  TemplateSet t = TemplateSet::builtin();
  for (const char* r : {"may_treat", "may_cause", "cause_of", "risk_factor_of", "authored",
                        "published_in", "cites"}) {
    EXPECT_NE(t.find(r), nullptr) << r;
  }
  EXPECT_EQ(t.at("authored").multihop_answer, MultihopAnswer::kCoHeads);
  EXPECT_EQ(t.at("may_treat").multihop_answer, MultihopAnswer::kTail);
}

TEST(Templates, ShippedFileMatchesBuiltin) {
  TemplateSet file = TemplateSet::load(testing::source_dir() / "data/templates/default.json");
  EXPECT_EQ(file.content_hash(), TemplateSet::builtin().content_hash());
}

TEST(Templates, ParseCanonicalizesNames) {
  TemplateSet t = TemplateSet::parse(kGood);
  EXPECT_NE(t.find("may_treat"), nullptr);
  EXPECT_EQ(t.at("may_treat").question_forward, "What may treat {tail}?");
}

TEST(Templates, MissingRelation) {
  TemplateSet t = TemplateSet::parse(kGood);
  try {
    t.at("cures");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingTemplate);
  }
}

TEST(Templates, Validation) {
  EXPECT_EQ(parse_code("[]"), ErrorCode::kInvalidTemplate);
  EXPECT_EQ(parse_code(R"({"version":2,"relations":{}})"), ErrorCode::kInvalidTemplate);
  EXPECT_EQ(parse_code(R"({"version":1})"), ErrorCode::kInvalidTemplate);
  std::string s(kGood);
  // A forward question must not reveal its answer.
  std::string leak = s;
  leak.replace(leak.find("What may treat {tail}?"), 22, "Does {head} treat {tail}?");
  EXPECT_EQ(parse_code(leak), ErrorCode::kInvalidTemplate);
  std::string no_head = s;
  no_head.replace(no_head.find("{head} may treat"), 16, "it may treat");
  EXPECT_EQ(parse_code(no_head), ErrorCode::kInvalidTemplate);
  std::string bad_mode = s;
  bad_mode.replace(bad_mode.find("\"tail\"}"), 6, "\"both\"");
  EXPECT_EQ(parse_code(bad_mode), ErrorCode::kInvalidTemplate);
}

TEST(Templates, CoHeadsMayMentionTail) {
  RelationType r{"authored", "{head} wrote [{tail}]", "[{tail}] was written by {head}",
                 "[{tail}] was written by whom?", "Which papers did {head} write?",
                 "{head} plans a paper like [{tail}]. Who should they work with?",
                 MultihopAnswer::kCoHeads};
  EXPECT_NO_THROW(r.validate());
  r.multihop_answer = MultihopAnswer::kTail;
  EXPECT_THROW(r.validate(), Error);
}

TEST(Templates, HashTracksContent) {
  TemplateSet a = TemplateSet::parse(kGood);
  std::string other(kGood);
  other.replace(other.find("What else"), 9, "What more");
  EXPECT_NE(a.content_hash(), TemplateSet::parse(other).content_hash());
  EXPECT_EQ(a.content_hash(), TemplateSet::parse(kGood).content_hash());
}

}  // namespace
}  // namespace kg2ft
