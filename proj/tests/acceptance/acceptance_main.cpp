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

// One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "kg2ft/encode.hpp"
#include "kg2ft/error.hpp"
#include "kg2ft/eval.hpp"
#include "kg2ft/ingest.hpp"
#include "kg2ft/log.hpp"
#include "kg2ft/pipeline.hpp"
#include "kg2ft/qa.hpp"
#include "kg2ft/text.hpp"
#include "test_graphs.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kg2ft;

using EdgeKey = std::tuple<std::string, std::string, std::string>;

EdgeKey key(const Edge& e) { return {e.head.str(), e.relation, e.tail.str()}; }
EdgeKey key(const json& e) { return {e[0], e[1], e[2]}; }

// Collects violations; a criterion passes with zero of them.
struct Check {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 20) failures.push_back(what);
    if (!ok && failures.size() >= 20) failures.back() = "... (more)";
  }
};

int sh(const std::string& args) {
  const std::string cmd = std::string("'") + KG2FT_BINARY + "' --log-level off " + args;
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::vector<json> out;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

std::vector<EvalItem> as_items(const std::vector<QASample>& qas) {
  std::stringstream ss;
  for (std::size_t i = 0; i < qas.size(); ++i) ss << eval_record(i, qas[i]).dump() << '\n';
  return parse_eval_lines(ss);
}

// Undirected distance <= 2 over an explicit edge list.
bool within_two(const std::vector<Edge>& edges, const std::string& a, const std::string& b) {
  std::map<std::string, std::set<std::string>> adj;
  for (const Edge& e : edges) {
    adj[e.head.str()].insert(e.tail.str());
    adj[e.tail.str()].insert(e.head.str());
  }
  std::map<std::string, int> dist{{a, 0}};
  std::queue<std::string> q;
  q.push(a);
  while (!q.empty()) {
    std::string u = q.front();
    q.pop();
    if (u == b) return true;
    if (dist[u] == 2) continue;
    for (const std::string& w : adj[u]) {
      if (dist.emplace(w, dist[u] + 1).second) q.push(w);
    }
  }
  return false;
}

// Every node answering `s` in g, by a scan of the edge list.
std::set<std::string> oracle_answers(const KnowledgeGraph& g, const QASample& s) {
  std::set<std::string> out;
  for (const Edge& e : g.edges()) {
    if (e.relation != s.relation) continue;
    if (s.role == AnswerRole::kTails && e.head == s.anchor) out.insert(e.tail.str());
    if (s.role != AnswerRole::kTails && e.tail == s.anchor) out.insert(e.head.str());
  }
  if (s.role == AnswerRole::kCoHeads) out.erase(s.subject.str());
  return out;
}

RunConfig base_config() {
  RunConfig c;
  c.seed = 7;
  return c;
}

// A1: one fact and one inverse training sample per edge, via the CLI.
Check a1(const fs::path& work) {
  Check c;
  const fs::path graph = work / "a1.kgz";
  const fs::path out = work / "a1";
  const auto start = std::chrono::steady_clock::now();
  c.expect(sh("ingest --format triples --input '" +
              testing::fixture("synthetic_500.tsv").string() + "' --out '" + graph.string() +
              "' >/dev/null") == 0,
           "ingest failed");
  c.expect(sh("build --graph '" + graph.string() +
              "' --strategy triples --tasks fact,inverse --seed 7 --out '" + out.string() +
              "' >/dev/null") == 0,
           "build failed");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::map<std::string, std::map<EdgeKey, int>> covered;
  std::size_t open = 0;
  for (const json& r : read_jsonl(out / "train.jsonl")) {
    ++open;  // training samples are open-ended by construction
    for (const json& e : r["meta"]["qa_edges"]) ++covered[r["task"]][key(e)];
  }
  IngestResult ref = load_triples(TripleFileSpec{.path = testing::fixture("synthetic_500.tsv")});
  for (const char* task : {"fact", "inverse"}) {
    c.expect(covered[task].size() == 500,
             std::string(task) + " covers " + std::to_string(covered[task].size()) + " edges");
    for (const Edge& e : ref.graph.edges()) {
      c.expect(covered[task][key(e)] == 1, std::string(task) + " misses or repeats an edge");
    }
  }
  c.expect(ref.graph.edge_count() == 500, "fixture is not 500 edges");
  c.expect(open == 1000, "train samples " + std::to_string(open));
  c.expect(read_jsonl(out / "eval_fact_open.jsonl").size() == 500, "eval fact/open != 500");
  c.expect(read_jsonl(out / "eval_inverse_open.jsonl").size() == 500, "eval inverse/open != 500");
  c.expect(secs < 10.0, "runtime " + std::to_string(secs) + " s");
  c.detail = "fact=" + std::to_string(covered["fact"].size()) +
             " inverse=" + std::to_string(covered["inverse"].size()) +
             " time=" + std::to_string(secs).substr(0, 4) + "s";
  return c;
}

// A2: budget, partition count and disjoint cover around a degree-300 hub.
Check a2() {
  Check c;
  const KnowledgeGraph g = testing::skew_hub(300);
  std::size_t checked = 0;
  std::size_t flagged = 0;
  std::size_t hub_partitions = 0;
  for (const char* strategy : {"triples", "groups", "adjacency"}) {
    RunConfig cfg = base_config();
    cfg.t_max = 256;
    cfg.strategy = strategy;
    cfg.tasks = {"fact", "inverse"};
    cfg.formats = {"open"};
    Dataset ds = generate_dataset(g, cfg, BuildOptions{.jobs = 1});
    // Each hub partition's contexts, deduplicated by partition and text.
    std::map<std::pair<int, std::string>, std::vector<Edge>> contexts;
    std::set<int> parts;
    for (const TrainingSample& s : ds.train) {
      if (s.oversized) {
        ++flagged;
      } else {
        ++checked;
        c.expect(estimate_tokens(s.combined_text, cfg.chars_per_token) <= 256,
                 std::string(strategy) + " sample over budget");
      }
      if (s.center.str() != "hub") continue;
      parts.insert(s.partition_index);
      contexts.emplace(std::pair{s.partition_index, s.context_text}, s.context_edges);
    }
    // Oracle: at k = 1 the hub's context is exactly its incident edges.
    std::multiset<EdgeKey> expected;
    for (const Edge& e : g.edges()) {
      if (e.head.str() == "hub" || e.tail.str() == "hub") expected.insert(key(e));
    }
    std::multiset<EdgeKey> got;
    for (const auto& [_, edges] : contexts) {
      for (const Edge& e : edges) got.insert(key(e));
    }
    c.expect(expected.size() == 300, "hub degree " + std::to_string(expected.size()));
    c.expect(got == expected, std::string(strategy) + " hub contexts are not a disjoint cover");
    const std::size_t floor_parts = (300 + (cfg.n_max - 1) - 1) / (cfg.n_max - 1);
    c.expect(parts.size() >= floor_parts,
             std::string(strategy) + " hub partitions " + std::to_string(parts.size()));
    hub_partitions = std::max(hub_partitions, parts.size());
  }
  c.expect(checked > 0, "no samples checked");
  c.detail = "within budget=" + std::to_string(checked) + " flagged=" + std::to_string(flagged) +
             " hub partitions=" + std::to_string(hub_partitions);
  return c;
}

bool same_tree(const fs::path& a, const fs::path& b, Check& c) {
  bool same = true;
  for (const std::string& f : dataset_file_names()) {
    const bool eq = testing::read_file(a / f) == testing::read_file(b / f) && fs::exists(a / f);
    c.expect(eq, f + " differs between " + a.filename().string() + " and " +
                     b.filename().string());
    same = same && eq;
  }
  return same;
}

// A3: byte-identical reruns, and independence from the worker count.
Check a3(const fs::path& work) {
  Check c;
  const fs::path cache = work / "a3_cache";
  const std::string fixtures = testing::fixture("llm_fixtures.json").string();
  // Same command lines each time; the manifest records the graph path.
  const fs::path graph = work / "a3.kgz";
  std::map<std::string, std::string> graph_bytes;
  auto run = [&](const std::string& tag, int jobs) {
    c.expect(sh("ingest --format triples --input '" +
                testing::fixture("synthetic_500.tsv").string() + "' --out '" + graph.string() +
                "' >/dev/null") == 0,
             "ingest " + tag);
    graph_bytes[tag] = testing::read_file(graph);
    c.expect(sh("build --graph '" + graph.string() +
                "' --strategy summarized --seed 7 --llm-backend stub --llm-fixtures '" + fixtures +
                "' --llm-cache '" + cache.string() + "' --jobs " + std::to_string(jobs) +
                " --out '" + (work / ("a3_" + tag)).string() + "' >/dev/null") == 0,
             "build " + tag);
    return work / ("a3_" + tag);
  };
  run("warmup", 2);  // fills the cache
  const fs::path r1 = run("run1", 2);
  const fs::path r2 = run("run2", 2);
  const fs::path j1 = run("jobs1", 1);
  const fs::path j8 = run("jobs8", 8);
  c.expect(!graph_bytes["run1"].empty() && graph_bytes["run1"] == graph_bytes["run2"],
           "graph files differ");
  const bool reruns = same_tree(r1, r2, c);
  const bool jobs = same_tree(j1, j8, c);
  c.detail = std::string("reruns ") + (reruns ? "identical" : "differ") + ", jobs 1 vs 8 " +
             (jobs ? "identical" : "differ");
  return c;
}

struct SeededRun {
  KnowledgeGraph graph;
  Dataset ds;
};

// Twenty seeded builds over random graphs, shared by A4 to A6.
std::vector<SeededRun> seeded_runs() {
  std::vector<SeededRun> out;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SeededRun r;
    r.graph = testing::random_graph(seed, 80, 260, 3);
    RunConfig cfg = base_config();
    cfg.seed = seed;
    cfg.split = 0.7;
    cfg.strategy = seed % 2 ? "triples" : "groups";
    r.ds = generate_dataset(r.graph, cfg, BuildOptions{.jobs = 1});
    out.push_back(std::move(r));
  }
  return out;
}

// A4: no test edge in training contexts; multihop answers are reachable.
Check a4(const std::vector<SeededRun>& runs) {
  Check c;
  std::size_t multihop = 0;
  for (const SeededRun& r : runs) {
    std::set<EdgeKey> test;
    for (const Edge& e : r.ds.split.test_edges) test.insert(key(e));
    c.expect(r.ds.split_applied && !test.empty(), "split not applied");
    for (const TrainingSample& s : r.ds.train) {
      for (const Edge& e : s.context_edges) c.expect(!test.count(key(e)), "context leak");
      for (const Edge& e : s.qa.source_edges) c.expect(!test.count(key(e)), "question leak");
    }
    for (const auto& [tf, qas] : r.ds.eval) {
      if (tf.first != TaskKind::kMultiHop) continue;
      for (const QASample& q : qas) {
        ++multihop;
        c.expect(!q.source_edges.empty(), "multihop question without an answer edge");
        for (const Edge& e : q.source_edges) {
          c.expect(test.count(key(e)) == 1, "multihop answer edge is a training edge");
          c.expect(within_two(r.ds.split.train_edges, e.head.str(), e.tail.str()),
                   "multihop endpoints beyond two hops");
        }
      }
    }
  }
  c.expect(multihop > 0, "no multihop questions generated");
  c.detail = "seeds=20 multihop questions=" + std::to_string(multihop);
  return c;
}

// A5: every MC question over the seeded runs and the synthetic fixture.
Check a5(const std::vector<SeededRun>& runs, const KnowledgeGraph& synthetic,
         const Dataset& synthetic_ds) {
  Check c;
  std::size_t n = 0;
  auto check = [&](const KnowledgeGraph& g, const Dataset& ds) {
    std::map<std::string, std::set<std::string>> types_of_label;
    std::map<std::string, std::string> label_of;
    for (const Node& node : g.nodes()) {
      types_of_label[node.label].insert(node.node_type);
      label_of[node.id.str()] = node.label;
    }
    for (const auto& [tf, qas] : ds.eval) {
      if (tf.second != AnswerFormat::kMultipleChoice) continue;
      for (const QASample& q : qas) {
        ++n;
        c.expect(q.options.size() == 5, "option count " + std::to_string(q.options.size()));
        std::set<std::string> norm;
        for (const std::string& o : q.options) norm.insert(text::normalize_answer(o));
        c.expect(norm.size() == q.options.size(), "duplicate options");
        c.expect(q.correct_index >= 0 && q.correct_index < static_cast<int>(q.options.size()),
                 "correct_index out of range");
        if (q.correct_index < 0 || q.correct_index >= static_cast<int>(q.options.size())) continue;
        const std::set<std::string> valid = oracle_answers(g, q);
        std::set<std::string> valid_labels;
        for (const std::string& id : valid) valid_labels.insert(text::normalize_answer(label_of[id]));
        int correct = 0;
        for (const std::string& o : q.options) correct += valid_labels.count(text::normalize_answer(o));
        c.expect(correct == 1, "options with a valid answer: " + std::to_string(correct));
        c.expect(valid_labels.count(text::normalize_answer(q.options[q.correct_index])) == 1,
                 "marked option is not a valid answer");
        const std::string answer_type = g.node(q.answer_nodes.front()).node_type;
        for (int i = 0; i < static_cast<int>(q.options.size()); ++i) {
          if (i == q.correct_index) continue;
          c.expect(types_of_label[q.options[i]].count(answer_type) == 1,
                   "distractor '" + q.options[i] + "' is not a " + answer_type + " label");
        }
      }
    }
  };
  for (const SeededRun& r : runs) check(r.graph, r.ds);
  check(synthetic, synthetic_ds);
  c.expect(n > 0, "no MC questions");
  c.detail = "mc questions=" + std::to_string(n);
  return c;
}

// A6: gold scores 1, uniform random scores 1/5 within 3 sigma.
Check a6(const std::vector<SeededRun>& runs) {
  Check c;
  std::size_t mc_sets = 0;
  std::size_t open_sets = 0;
  for (const SeededRun& r : runs) {
    for (const auto& [tf, qas] : r.ds.eval) {
      if (qas.empty()) continue;
      const std::vector<EvalItem> items = as_items(qas);
      const auto gold = reference_responder(ResponderKind::kGold, items);
      if (tf.second == AnswerFormat::kMultipleChoice) {
        ++mc_sets;
        c.expect(*score_mc(items, gold).accuracy == 1.0, "gold MC accuracy below 1");
      } else {
        ++open_sets;
        c.expect(*score_token_f1(items, gold).f1 == 1.0, "gold token-F1 below 1");
      }
    }
  }
  // A larger MC-only build for the random responder.
  const KnowledgeGraph big = testing::random_graph(99, 1500, 5000, 3);
  RunConfig cfg = base_config();
  cfg.tasks = {"fact", "inverse"};
  cfg.formats = {"mc"};
  Dataset ds = generate_dataset(big, cfg, BuildOptions{.jobs = 1});
  std::vector<QASample> all;
  for (const auto& [_, qas] : ds.eval) all.insert(all.end(), qas.begin(), qas.end());
  const std::vector<EvalItem> items = as_items(all);
  c.expect(items.size() >= 5000, "random set has " + std::to_string(items.size()) + " items");
  const double gold = *score_mc(items, reference_responder(ResponderKind::kGold, items)).accuracy;
  const double random =
      *score_mc(items, reference_responder(ResponderKind::kRandom, items, 7)).accuracy;
  c.expect(gold == 1.0, "gold accuracy on the large set");
  c.expect(std::abs(random - 0.2) <= 0.02, "random accuracy " + std::to_string(random));
  std::ostringstream d;
  d.precision(4);
  d << "mc sets=" << mc_sets << " open sets=" << open_sets << " random=" << random
    << " (n=" << items.size() << ")";
  c.detail = d.str();
  return c;
}

// A7: mapped phrases appear, edges survive, and a disabled backend falls back.
Check a7() {
  Check c;
  IngestResult in =
      load_triples(TripleFileSpec{.path = testing::fixture("summary_triples.tsv")});
  RunConfig cfg = base_config();
  cfg.tasks = {"fact", "inverse"};
  cfg.formats = {"open"};
  cfg.strategy = "groups";
  const Dataset base = generate_dataset(in.graph, cfg, BuildOptions{.jobs = 1});
  cfg.strategy = "summarized";
  cfg.llm.backend = "stub";
  cfg.llm.fixtures_path = testing::fixture("llm_fixtures.json").string();
  const Dataset summ = generate_dataset(in.graph, cfg, BuildOptions{.jobs = 1});
  cfg.llm.backend = "none";
  const Dataset off = generate_dataset(in.graph, cfg, BuildOptions{.jobs = 1});

  const std::vector<std::pair<std::string, std::string>> mappings = {
      {"Insulin human, rDNA origin", "Insulin therapy from recombinant DNA"},
      {"Hypoinsulinaemia", "low insulin levels (hypoinsulinaemia)"},
      {"rDNA", "recombinant DNA"}};
  std::map<std::string, int> hits;
  c.expect(summ.train.size() == base.train.size() && off.train.size() == base.train.size(),
           "sample counts differ");
  const std::size_t n = std::min({base.train.size(), summ.train.size(), off.train.size()});
  for (std::size_t i = 0; i < n; ++i) {
    const TrainingSample& b = base.train[i];
    const TrainingSample& s = summ.train[i];
    const TrainingSample& o = off.train[i];
    c.expect(s.context_edges == b.context_edges, "summarized source_edges changed");
    c.expect(s.qa.source_edges == b.qa.source_edges, "summarized qa edges changed");
    for (const auto& [from, to] : mappings) {
      if (b.context_text.find(from) == std::string::npos) continue;
      // The first matching mapping decides the rewrite.
      c.expect(s.context_text.find(to) != std::string::npos, "missing '" + to + "'");
      c.expect(!s.fallback, "unexpected fallback");
      ++hits[from];
      break;
    }
    c.expect(o.fallback, "disabled backend sample without fallback flag");
    c.expect(o.context_text == b.context_text && o.combined_text == b.combined_text,
             "fallback differs from the base encoding");
    c.expect(o.context_edges == b.context_edges, "fallback source_edges changed");
  }
  for (const auto& [from, _] : mappings) c.expect(hits[from] > 0, "mapping unused: " + from);
  c.detail = "samples=" + std::to_string(n) + " rewritten=" +
             std::to_string(hits["Insulin human, rDNA origin"] + hits["Hypoinsulinaemia"] +
                            hits["rDNA"]) +
             " fallback (disabled)=" + std::to_string(off.stats.fallback);
  return c;
}

// A8: split arithmetic on 100 edges.
Check a8() {
  Check c;
  const KnowledgeGraph g = testing::random_graph(8, 40, 100, 3);
  c.expect(g.edge_count() == 100, "graph edge count");
  for (std::uint64_t seed : {0ULL, 7ULL, 42ULL, 1234567ULL}) {
    const EdgeSplit a = split_edges(g, 0.7, seed);
    const EdgeSplit b = split_edges(g, 0.7, seed);
    c.expect(a.train_edges.size() == 70 && a.test_edges.size() == 30, "not 70/30");
    std::set<EdgeKey> train;
    std::set<EdgeKey> all;
    for (const Edge& e : a.train_edges) train.insert(key(e));
    for (const Edge& e : a.test_edges) c.expect(!train.count(key(e)), "split overlaps");
    for (const Edge& e : a.train_edges) all.insert(key(e));
    for (const Edge& e : a.test_edges) all.insert(key(e));
    std::set<EdgeKey> graph_edges;
    for (const Edge& e : g.edges()) graph_edges.insert(key(e));
    c.expect(all == graph_edges, "split union is not the edge set");
    c.expect(a.train_edges == b.train_edges && a.test_edges == b.test_edges,
             "split not deterministic");
  }
  c.detail = "70/30 over 4 seeds";
  return c;
}

bool report(const std::string& id, const std::function<Check()>& fn) {
  Check c;
  try {
    c = fn();
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const bool ok = c.failures.empty();
  std::cout << id << ' ' << (ok ? "PASS" : "FAIL") << ' ' << c.detail;
  for (const std::string& f : c.failures) std::cout << "\n    " << f;
  std::cout << std::endl;
  return ok;
}

}  // namespace

int main() {
  log::set_level(log::Level::kOff);
  const fs::path work = testing::temp_dir("acceptance");
  bool ok = true;
  ok &= report("A1", [&] { return a1(work); });
  ok &= report("A2", [] { return a2(); });
  ok &= report("A3", [&] { return a3(work); });
  const std::vector<SeededRun> runs = seeded_runs();
  ok &= report("A4", [&] { return a4(runs); });
  ok &= report("A5", [&] {
    IngestResult in = load_triples(TripleFileSpec{.path = testing::fixture("synthetic_500.tsv")});
    RunConfig cfg = base_config();
    return a5(runs, in.graph, generate_dataset(in.graph, cfg, BuildOptions{.jobs = 1}));
  });
  ok &= report("A6", [&] { return a6(runs); });
  ok &= report("A7", [] { return a7(); });
  ok &= report("A8", [] { return a8(); });
  fs::remove_all(work);
  return ok ? 0 : 1;
}
