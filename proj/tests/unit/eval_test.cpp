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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "kg2ft/error.hpp"
#include "kg2ft/eval.hpp"
#include "test_graphs.hpp"

namespace kg2ft {
namespace {

using nlohmann::json;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no kg2ft::Error thrown";
  return ErrorCode::kInvalidConfig;
}

std::vector<EvalItem> mc_items(std::size_t n) {
  std::vector<EvalItem> out;
  for (std::size_t i = 0; i < n; ++i) {
    EvalItem it;
    it.id = i;
    it.question = "Q" + std::to_string(i);
    it.options = {"a" + std::to_string(i), "b", "c", "d", "e"};
    it.correct_index = static_cast<int>(i % 5);
    std::swap(it.options[0], it.options[static_cast<std::size_t>(it.correct_index)]);
    it.answer = it.options[static_cast<std::size_t>(it.correct_index)];
    it.format = AnswerFormat::kMultipleChoice;
    out.push_back(std::move(it));
  }
  return out;
}

std::vector<EvalItem> open_items(const std::vector<std::string>& answers) {
  std::vector<EvalItem> out;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    EvalItem it;
    it.id = i;
    it.answer = answers[i];
    out.push_back(std::move(it));
  }
  return out;
}

// Bag-of-words F1 via sorted-token intersection, written independently of
// the scorer's counting map.
double oracle_f1(const std::vector<std::string>& r, const std::vector<std::string>& a) {
  if (r.empty() && a.empty()) return 1.0;
  std::vector<std::string> rs = r, as = a, common;
  std::sort(rs.begin(), rs.end());
  std::sort(as.begin(), as.end());
  std::set_intersection(rs.begin(), rs.end(), as.begin(), as.end(), std::back_inserter(common));
  if (common.empty()) return 0.0;
  double p = static_cast<double>(common.size()) / rs.size();
  double rc = static_cast<double>(common.size()) / as.size();
  return 2 * p * rc / (p + rc);
}

TEST(TokenF1, Examples) {
  EXPECT_DOUBLE_EQ(token_f1("insulin and metformin", "metformin and insulin").f1, 1.0);
  TokenF1 partial = token_f1("insulin", "insulin and metformin");
  EXPECT_DOUBLE_EQ(partial.precision, 1.0);
  EXPECT_DOUBLE_EQ(partial.recall, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(partial.f1, 0.5);
  EXPECT_DOUBLE_EQ(token_f1("", "").f1, 1.0);
  EXPECT_DOUBLE_EQ(token_f1("", "x").f1, 0.0);
  EXPECT_DOUBLE_EQ(token_f1("x", "").f1, 0.0);
  EXPECT_DOUBLE_EQ(token_f1("the the", "the").f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(token_f1("Insulin, (rDNA).", "insulin rdna").f1, 1.0);
}

TEST(TokenF1Property, MatchesOracleSymmetricAndOrderFree) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> vocab{"insulin", "and", "metformin", "diabetes", "the", "of"};
  auto draw = [&] {
    std::vector<std::string> v;
    for (int k = static_cast<int>(rng() % 6); k > 0; --k) v.push_back(vocab[rng() % vocab.size()]);
    return v;
  };
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& t : v) s += (s.empty() ? "" : " ") + t;
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    auto a = draw();
    auto b = draw();
    TokenF1 ab = token_f1(join(a), join(b));
    TokenF1 ba = token_f1(join(b), join(a));
    EXPECT_NEAR(ab.f1, oracle_f1(a, b), 1e-12);
    EXPECT_NEAR(ab.f1, ba.f1, 1e-12);
    EXPECT_NEAR(ab.precision, ba.recall, 1e-12);
    std::shuffle(a.begin(), a.end(), rng);
    EXPECT_NEAR(token_f1(join(a), join(b)).f1, ab.f1, 1e-12);
  }
}

TEST(ExactMatch, FrozenSheet) {
  auto items = load_eval_file(testing::fixture("exact_100_eval.jsonl"));
  auto responses = load_responses(testing::fixture("exact_100_responses.jsonl"));
  json oracle = json::parse(testing::read_file(testing::fixture("exact_100_oracle.json")));
  ScoreReport r = score_exact(items, responses);
  ASSERT_EQ(r.samples.size(), 100u);
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_EQ(*r.samples[i].score, oracle["scores"][i].get<double>()) << "item " << i;
  }
  EXPECT_DOUBLE_EQ(*r.accuracy, oracle["mean"].get<double>());
}

TEST(Mc, GoldIsPerfectAndTextMatches) {
  auto items = mc_items(50);
  ScoreReport gold = score_mc(items, reference_responder(ResponderKind::kGold, items));
  EXPECT_DOUBLE_EQ(*gold.accuracy, 1.0);
  EXPECT_FALSE(gold.f1.has_value());
  std::vector<ModelResponse> text;
  for (const EvalItem& it : items) text.push_back({it.id, "  " + it.answer + ".", std::nullopt});
  EXPECT_DOUBLE_EQ(*score_mc(items, text).accuracy, 1.0);
  for (auto& r : text) r.response = "unknown option";
  EXPECT_DOUBLE_EQ(*score_mc(items, text).accuracy, 0.0);
}

TEST(Mc, RandomResponderIsBinomial) {
  auto items = mc_items(5000);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ScoreReport r = score_mc(items, reference_responder(ResponderKind::kRandom, items, seed));
    // 3 sigma of Binomial(5000, 0.2) / 5000.
    EXPECT_NEAR(*r.accuracy, 0.2, 3 * std::sqrt(0.2 * 0.8 / 5000));
  }
}

TEST(Mc, ResponseErrors) {
  auto items = mc_items(12);
  auto gold = reference_responder(ResponderKind::kGold, items);
  auto missing = gold;
  missing.erase(missing.begin() + 3);
  EXPECT_EQ(code_of([&] { score_mc(items, missing); }), ErrorCode::kMissingResponse);
  auto extra = gold;
  extra.push_back({99, std::nullopt, 0});
  EXPECT_EQ(code_of([&] { score_mc(items, extra); }), ErrorCode::kFormatMismatch);
  auto out_of_range = gold;
  out_of_range[0].choice = 5;
  EXPECT_EQ(code_of([&] { score_mc(items, out_of_range); }), ErrorCode::kFormatMismatch);
  EXPECT_EQ(code_of([&] { score_exact(items, gold); }), ErrorCode::kFormatMismatch);
  auto open = open_items({"x"});
  EXPECT_EQ(code_of([&] { score_mc(open, {{0, "x", std::nullopt}}); }),
            ErrorCode::kFormatMismatch);
  try {
    std::vector<ModelResponse> none;
    score_mc(items, none);
  } catch (const Error& e) {
    std::string what = e.what();
    EXPECT_NE(what.find("12 sample(s)"), std::string::npos);
    EXPECT_NE(what.find("..."), std::string::npos);
  }
}

TEST(Open, GoldTokenF1IsOne) {
  auto items = open_items({"insulin and metformin", "KDD", "Anders Berglund", ""});
  ScoreReport r = score_token_f1(items, reference_responder(ResponderKind::kGold, items));
  EXPECT_DOUBLE_EQ(*r.f1, 1.0);
  ScoreReport blank = score_token_f1(items, reference_responder(ResponderKind::kBlank, items));
  EXPECT_DOUBLE_EQ(*blank.f1, 0.25);  // only the empty answer matches
  ScoreReport random = score_exact(items, reference_responder(ResponderKind::kRandom, items));
  EXPECT_DOUBLE_EQ(*random.accuracy, 0.0);
}

TEST(Report, SummaryAndRoundTrip) {
  ScoreReport r;
  r.metric = "mc";
  r.task = "fact";
  r.format = "mc";
  r.n = 300;
  r.accuracy = 0.6123;
  for (std::size_t i = 0; i < 300; ++i) {
    double s = i < 184 ? 1.0 : 0.0;
    r.samples.push_back({i, s, s, s, s});
  }
  EXPECT_EQ(r.summary(), "mc on fact/mc (n=300): accuracy 61.23%");
  auto dir = testing::temp_dir("report");
  r.save(dir / "r.json");
  ScoreReport back = ScoreReport::load(dir / "r.json");
  EXPECT_EQ(back.to_json(), r.to_json());
  EXPECT_EQ(back.summary(), r.summary());
  std::filesystem::remove_all(dir);

  ScoreReport f1;
  f1.metric = "token-f1";
  f1.format = "open";
  f1.precision = 0.5;
  f1.recall = 0.25;
  f1.f1 = 1.0 / 3.0;
  EXPECT_EQ(f1.summary(), "token-f1 on open (n=0): P 0.500 R 0.250 F1 0.333");
}

TEST(Report, SchemaValidation) {
  json good = json{{"metric", "bertscore"}, {"n", 1}, {"f1", 0.9},
                   {"samples", json::array({json{{"sample_id", 0}, {"f1", 0.9}}})}};
  EXPECT_DOUBLE_EQ(*ScoreReport::from_json(good).f1, 0.9);
  json high = good;
  high["f1"] = 1.2;
  EXPECT_EQ(code_of([&] { ScoreReport::from_json(high); }), ErrorCode::kMalformedSample);
  json count = good;
  count["n"] = 2;
  EXPECT_EQ(code_of([&] { ScoreReport::from_json(count); }), ErrorCode::kMalformedSample);
  EXPECT_EQ(code_of([] { ScoreReport::from_json(json::array()); }), ErrorCode::kMalformedSample);
  EXPECT_EQ(code_of([] { ScoreReport::from_json(json{{"n", 1}}); }), ErrorCode::kMalformedSample);
}

TEST(Files, ParseErrorsCarryLines) {
  std::istringstream bad_eval(
      "{\"id\":0,\"question\":\"q\",\"answer\":\"a\",\"options\":[],\"task\":\"fact\",\"format\":\"open\"}\n"
      "{\"id\":1,\"question\":\"q\",\"answer\":\"a\",\"options\":[\"a\"],\"correct_index\":0,"
      "\"task\":\"fact\",\"format\":\"mc\"}\n");
  try {
    parse_eval_lines(bad_eval);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedSample);
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream bad_resp("{\"sample_id\":0,\"response\":\"x\"}\n\n{\"sample_id\":1}\n");
  try {
    parse_response_lines(bad_resp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Files, ResponsesRoundTrip) {
  std::vector<ModelResponse> rs{{0, "insulin", std::nullopt}, {1, std::nullopt, 3}};
  auto dir = testing::temp_dir("responses");
  write_responses(rs, dir / "r.jsonl");
  auto back = load_responses(dir / "r.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].response, "insulin");
  EXPECT_EQ(back[1].choice, 3);
  std::filesystem::remove_all(dir);
}

TEST(Responder, ParseNames) {
  EXPECT_EQ(parse_responder("random"), ResponderKind::kRandom);
  EXPECT_EQ(code_of([] { parse_responder("oracle"); }), ErrorCode::kInvalidConfig);
}

}  // namespace
}  // namespace kg2ft
