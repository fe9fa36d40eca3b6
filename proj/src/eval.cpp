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

#include "kg2ft/eval.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "kg2ft/error.hpp"
#include "kg2ft/rng.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {
namespace {

using nlohmann::json;

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

// sample_id -> response, one per eval item. Throws MissingResponse and
// FormatMismatch (responses for ids the dataset does not have).
std::vector<const ModelResponse*> align(const std::vector<EvalItem>& items,
                                        const std::vector<ModelResponse>& responses) {
  std::unordered_map<std::size_t, const ModelResponse*> by_id;
  for (const ModelResponse& r : responses) by_id[r.sample_id] = &r;
  std::vector<const ModelResponse*> out;
  out.reserve(items.size());
  std::vector<std::size_t> missing;
  for (const EvalItem& item : items) {
    auto it = by_id.find(item.id);
    if (it == by_id.end()) {
      missing.push_back(item.id);
      out.push_back(nullptr);
    } else {
      out.push_back(it->second);
      by_id.erase(it);
    }
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << missing.size() << " sample(s) without a response, ids:";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg << ' ' << missing[i];
    if (missing.size() > 10) msg << " ...";
    throw Error(ErrorCode::kMissingResponse, msg.str());
  }
  if (!by_id.empty()) {
    throw Error(ErrorCode::kFormatMismatch,
                "response for sample_id " + std::to_string(by_id.begin()->first) +
                    " which the dataset does not contain");
  }
  return out;
}

void require_format(const std::vector<EvalItem>& items, AnswerFormat format) {
  for (const EvalItem& item : items) {
    if (item.format != format) {
      throw Error(ErrorCode::kFormatMismatch,
                  "sample " + std::to_string(item.id) + " is " +
                      std::string(to_string(item.format)) + ", metric needs " +
                      std::string(to_string(format)));
    }
  }
}

ScoreReport make_report(std::string metric, const std::vector<EvalItem>& items) {
  ScoreReport r;
  r.metric = std::move(metric);
  r.n = items.size();
  if (!items.empty()) {
    r.task = std::string(to_string(items.front().task));
    r.format = std::string(to_string(items.front().format));
    for (const EvalItem& item : items) {
      if (to_string(item.task) != r.task) r.task = "mixed";
    }
  }
  return r;
}

void finish_means(ScoreReport& r) {
  double p = 0, rc = 0, f = 0;
  for (const SampleScore& s : r.samples) {
    p += s.precision;
    rc += s.recall;
    f += s.f1;
  }
  const double n = r.samples.empty() ? 1.0 : static_cast<double>(r.samples.size());
  r.precision = p / n;
  r.recall = rc / n;
  r.f1 = f / n;
}

std::optional<double> opt_double(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw Error(ErrorCode::kMalformedSample, std::string("report field '") + key + "' not a number");
  }
  double v = it->get<double>();
  if (v < 0.0 || v > 1.0) {
    throw Error(ErrorCode::kMalformedSample, std::string("report field '") + key + "' outside [0, 1]");
  }
  return v;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<EvalItem> parse_eval_lines(std::istream& in) {
  std::vector<EvalItem> items;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    json r = json::parse(line, nullptr, false);
    if (r.is_discarded() || !r.is_object()) {
      throw Error(ErrorCode::kMalformedSample, "not a JSON object", n);
    }
    try {
      EvalItem item;
      item.id = r.at("id").get<std::size_t>();
      item.question = r.at("question").get<std::string>();
      item.answer = r.at("answer").get<std::string>();
      item.options = r.at("options").get<std::vector<std::string>>();
      item.task = parse_task(r.at("task").get<std::string>());
      item.format = parse_format(r.at("format").get<std::string>());
      if (item.format == AnswerFormat::kMultipleChoice) {
        item.correct_index = r.at("correct_index").get<int>();
        if (item.options.size() != 5 || item.correct_index < 0 ||
            item.correct_index >= static_cast<int>(item.options.size())) {
          throw Error(ErrorCode::kMalformedSample, "MC record needs 5 options and a valid index",
                      n);
        }
      }
      items.push_back(std::move(item));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedSample, e.what(), n);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kMalformedSample) throw;
      throw Error(ErrorCode::kMalformedSample, e.what(), n);
    }
  }
  return items;
}

std::vector<EvalItem> load_eval_file(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  return parse_eval_lines(in);
}

std::vector<ModelResponse> parse_response_lines(std::istream& in) {
  std::vector<ModelResponse> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    json r = json::parse(line, nullptr, false);
    if (r.is_discarded() || !r.is_object() || !r.contains("sample_id") ||
        !r["sample_id"].is_number_unsigned()) {
      throw Error(ErrorCode::kMalformedSample, "response record needs an integer sample_id", n);
    }
    ModelResponse m;
    m.sample_id = r["sample_id"].get<std::size_t>();
    if (auto it = r.find("response"); it != r.end()) {
      if (!it->is_string()) throw Error(ErrorCode::kMalformedSample, "'response' not a string", n);
      m.response = it->get<std::string>();
    }
    if (auto it = r.find("choice"); it != r.end()) {
      if (!it->is_number_integer()) {
        throw Error(ErrorCode::kMalformedSample, "'choice' not an integer", n);
      }
      m.choice = it->get<int>();
    }
    if (!m.response && !m.choice) {
      throw Error(ErrorCode::kMalformedSample, "response record needs 'response' or 'choice'", n);
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ModelResponse> load_responses(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  return parse_response_lines(in);
}

void write_responses(const std::vector<ModelResponse>& responses,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const ModelResponse& r : responses) {
    json j{{"sample_id", r.sample_id}};
    if (r.response) j["response"] = *r.response;
    if (r.choice) j["choice"] = *r.choice;
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

json ScoreReport::to_json() const {
  json per = json::array();
  for (const SampleScore& s : samples) {
    json j{{"sample_id", s.sample_id},
           {"precision", s.precision},
           {"recall", s.recall},
           {"f1", s.f1}};
    if (s.score) j["score"] = *s.score;
    per.push_back(std::move(j));
  }
  return json{{"metric", metric},   {"task", task},
              {"format", format},   {"n", n},
              {"accuracy", opt_json(accuracy)},
              {"precision", opt_json(precision)},
              {"recall", opt_json(recall)},
              {"f1", opt_json(f1)},
              {"samples", per}};
}

ScoreReport ScoreReport::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kMalformedSample, "report is not a JSON object");
  ScoreReport r;
  try {
    r.metric = j.at("metric").get<std::string>();
    r.task = j.value("task", "");
    r.format = j.value("format", "");
    r.n = j.at("n").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedSample, std::string("report: ") + e.what());
  }
  r.accuracy = opt_double(j, "accuracy");
  r.precision = opt_double(j, "precision");
  r.recall = opt_double(j, "recall");
  r.f1 = opt_double(j, "f1");
  if (auto it = j.find("samples"); it != j.end() && it->is_array()) {
    for (const json& s : *it) {
      SampleScore sc;
      try {
        sc.sample_id = s.at("sample_id").get<std::size_t>();
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kMalformedSample, std::string("report sample: ") + e.what());
      }
      sc.precision = opt_double(s, "precision").value_or(0.0);
      sc.recall = opt_double(s, "recall").value_or(0.0);
      sc.f1 = opt_double(s, "f1").value_or(0.0);
      sc.score = opt_double(s, "score");
      r.samples.push_back(sc);
    }
    if (r.samples.size() != r.n) {
      throw Error(ErrorCode::kMalformedSample, "report n differs from its sample count");
    }
  }
  return r;
}

ScoreReport ScoreReport::load(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kMalformedSample, path.string() + " is not JSON");
  return from_json(j);
}

void ScoreReport::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

std::string ScoreReport::summary() const {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  std::string where = task.empty() ? format : task + "/" + format;
  s << metric << " on " << (where.empty() ? "dataset" : where) << " (n=" << n << "):";
  if (accuracy) s << " accuracy " << *accuracy * 100.0 << "%";
  if (!accuracy || metric != "mc") {
    s << std::setprecision(3);
    if (precision) s << " P " << *precision;
    if (recall) s << " R " << *recall;
    if (f1) s << " F1 " << *f1;
  }
  return s.str();
}

TokenF1 token_f1(std::string_view response, std::string_view answer) {
  std::vector<std::string> r = text::answer_tokens(response);
  std::vector<std::string> a = text::answer_tokens(answer);
  if (r.empty() && a.empty()) return {1.0, 1.0, 1.0};
  if (r.empty() || a.empty()) return {0.0, 0.0, 0.0};
  std::map<std::string, int> counts;
  for (const std::string& t : a) ++counts[t];
  std::size_t common = 0;
  for (const std::string& t : r) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return {0.0, 0.0, 0.0};
  double p = static_cast<double>(common) / static_cast<double>(r.size());
  double rc = static_cast<double>(common) / static_cast<double>(a.size());
  return {p, rc, 2.0 * p * rc / (p + rc)};
}

ScoreReport score_mc(const std::vector<EvalItem>& items,
                     const std::vector<ModelResponse>& responses) {
  require_format(items, AnswerFormat::kMultipleChoice);
  std::vector<const ModelResponse*> aligned = align(items, responses);
  ScoreReport r = make_report("mc", items);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const EvalItem& item = items[i];
    const ModelResponse& resp = *aligned[i];
    int chosen = -1;
    if (resp.choice) {
      chosen = *resp.choice;
      if (chosen < 0 || chosen >= static_cast<int>(item.options.size())) {
        throw Error(ErrorCode::kFormatMismatch,
                    "choice " + std::to_string(chosen) + " out of range for sample " +
                        std::to_string(item.id));
      }
    } else {
      std::string want = text::normalize_answer(*resp.response);
      for (std::size_t k = 0; k < item.options.size(); ++k) {
        if (text::normalize_answer(item.options[k]) == want) {
          chosen = static_cast<int>(k);
          break;
        }
      }
    }
    double s = chosen == item.correct_index ? 1.0 : 0.0;
    if (s > 0) ++correct;
    r.samples.push_back({item.id, s, s, s, s});
  }
  r.accuracy = items.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(items.size());
  return r;
}

ScoreReport score_exact(const std::vector<EvalItem>& items,
                        const std::vector<ModelResponse>& responses) {
  require_format(items, AnswerFormat::kOpenEnded);
  std::vector<const ModelResponse*> aligned = align(items, responses);
  ScoreReport r = make_report("exact", items);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!aligned[i]->response) {
      throw Error(ErrorCode::kFormatMismatch,
                  "sample " + std::to_string(items[i].id) + " answered with a choice index");
    }
    double s = text::normalize_answer(*aligned[i]->response) ==
                       text::normalize_answer(items[i].answer)
                   ? 1.0
                   : 0.0;
    if (s > 0) ++hits;
    r.samples.push_back({items[i].id, s, s, s, s});
  }
  r.accuracy = items.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(items.size());
  finish_means(r);
  return r;
}

ScoreReport score_token_f1(const std::vector<EvalItem>& items,
                           const std::vector<ModelResponse>& responses) {
  require_format(items, AnswerFormat::kOpenEnded);
  std::vector<const ModelResponse*> aligned = align(items, responses);
  ScoreReport r = make_report("token-f1", items);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!aligned[i]->response) {
      throw Error(ErrorCode::kFormatMismatch,
                  "sample " + std::to_string(items[i].id) + " answered with a choice index");
    }
    TokenF1 t = token_f1(*aligned[i]->response, items[i].answer);
    r.samples.push_back({items[i].id, t.precision, t.recall, t.f1, std::nullopt});
  }
  finish_means(r);
  return r;
}

ResponderKind parse_responder(std::string_view name) {
  if (name == "gold") return ResponderKind::kGold;
  if (name == "random") return ResponderKind::kRandom;
  if (name == "blank") return ResponderKind::kBlank;
  throw Error(ErrorCode::kInvalidConfig, "responder must be gold|random|blank");
}

std::vector<ModelResponse> reference_responder(ResponderKind kind,
                                               const std::vector<EvalItem>& items,
                                               std::uint64_t seed) {
  DeterministicRng rng(seed);
  std::vector<ModelResponse> out;
  out.reserve(items.size());
  for (const EvalItem& item : items) {
    ModelResponse r;
    r.sample_id = item.id;
    const bool mc = item.format == AnswerFormat::kMultipleChoice;
    switch (kind) {
      case ResponderKind::kGold:
        if (mc) {
          r.choice = item.correct_index;
        } else {
          r.response = item.answer;
        }
        break;
      case ResponderKind::kRandom:
        if (mc) {
          r.choice = static_cast<int>(rng.below(item.options.size()));
        } else {
          r.response = std::string(kNonsenseToken);
        }
        break;
      case ResponderKind::kBlank:
        r.response = std::string();
        break;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace kg2ft
