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

#include "kg2ft/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "kg2ft/encode.hpp"
#include "kg2ft/error.hpp"
#include "kg2ft/graph_io.hpp"
#include "kg2ft/log.hpp"
#include "kg2ft/partition.hpp"
#include "kg2ft/templates.hpp"
#include "kg2ft/text.hpp"

#ifndef KG2FT_VERSION
#define KG2FT_VERSION "0.0.0"
#endif

namespace kg2ft {
namespace {

using nlohmann::json;

constexpr std::array<TaskKind, 3> kTasks = {TaskKind::kFactRecall, TaskKind::kInverseFactRecall,
                                            TaskKind::kMultiHop};
constexpr std::array<AnswerFormat, 2> kFormats = {AnswerFormat::kOpenEnded,
                                                  AnswerFormat::kMultipleChoice};

json edge_json(const Edge& e) { return json::array({e.head.str(), e.relation, e.tail.str()}); }

json edges_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back(edge_json(e));
  return out;
}

std::string_view role_name(AnswerRole r) {
  switch (r) {
    case AnswerRole::kHeads: return "heads";
    case AnswerRole::kTails: return "tails";
    case AnswerRole::kCoHeads: return "co_heads";
  }
  return "heads";
}

// Message of e without its "Code: " prefix.
std::string bare_message(const Error& e) {
  std::string what = e.what();
  std::string prefix = std::string(to_string(e.code())) + ": ";
  if (what.starts_with(prefix)) what.erase(0, prefix.size());
  std::string suffix = e.line() ? " (line " + std::to_string(*e.line()) + ")" : "";
  if (!suffix.empty() && what.ends_with(suffix)) what.erase(what.size() - suffix.size());
  return what;
}

std::string combine(std::string_view context, const QASample& qa) {
  std::string out(context);
  out += kContextSeparator;
  out += qa.question_text;
  out += kAnswerSeparator;
  out += qa.answer_text;
  return out;
}

StrategyKind base_of(const EncodingStrategy& s) {
  switch (s.kind) {
    case StrategyKind::kSummarized: return s.base;
    case StrategyKind::kNodeDescriptors: return StrategyKind::kAdjacencyList;
    default: return s.kind;
  }
}

// Read-only state shared by the workers.
struct Shared {
  const KnowledgeGraph& full;
  const KnowledgeGraph& train;
  const RunConfig& cfg;
  EncodingStrategy strategy;
  TemplateSet templates;
  PromptSet prompts;
  TokenBudget budget;
  LlmClient* llm = nullptr;
  DistractorPool pool;
};

struct NodeOutput {
  std::vector<TrainingSample> train;
  std::map<std::pair<TaskKind, AnswerFormat>, std::vector<QASample>> eval;
  BuildStats stats;
};

std::vector<EncodedContext> encode_base(const Shared& s, const Partition& p, int index) {
  switch (base_of(s.strategy)) {
    case StrategyKind::kTriples: return encode_triples(s.train, p, s.templates, index);
    case StrategyKind::kRelationalGroups:
      return encode_relational_groups(s.train, p, s.templates, index);
    default: return {encode_adjacency_list(s.train, p, s.templates, index)};
  }
}

std::vector<QASample> questions_for(const Shared& s, const EncodedContext& enc) {
  std::vector<QASample> out;
  if (s.cfg.has_task(TaskKind::kFactRecall)) {
    for (QASample& q : gen_fact_qa(s.train, enc, s.templates)) out.push_back(std::move(q));
  }
  if (s.cfg.has_task(TaskKind::kInverseFactRecall)) {
    for (QASample& q : gen_inverse_qa(s.train, enc, s.templates)) out.push_back(std::move(q));
  }
  return out;
}

struct Descriptor {
  std::string prefix;  // descriptor text plus a space, or empty
  std::vector<Edge> edges;
  std::optional<std::string> llm_cache_key;
  bool fallback = false;
};

void add_eval(const Shared& s, QASample qa, std::string_view context, NodeOutput& out) {
  if (s.cfg.eval_include_context && !context.empty()) {
    qa.question_text = std::string(context) + std::string(kContextSeparator) + qa.question_text;
  }
  if (s.cfg.has_format(AnswerFormat::kMultipleChoice)) {
    try {
      out.eval[{qa.task, AnswerFormat::kMultipleChoice}].push_back(to_multiple_choice(
          qa, s.full, s.pool, question_seed(s.cfg.seed, qa), s.cfg.n_distractors));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientDistractorPool) throw;
      ++out.stats.mc_skipped;
      log::debug("mc_skipped", {{"question", qa.question_text}, {"reason", e.what()}});
    }
  }
  if (s.cfg.has_format(AnswerFormat::kOpenEnded)) {
    out.eval[{qa.task, AnswerFormat::kOpenEnded}].push_back(std::move(qa));
  }
}

NodeOutput process_node(const Shared& s, const NodeId& v) {
  NodeOutput out;
  ContextSubgraph ctx = s.train.k_hop_context(v, s.cfg.k);
  if (ctx.empty()) return out;
  out.stats.nodes_visited = 1;

  Descriptor desc;
  if (s.strategy.kind == StrategyKind::kNodeDescriptors) {
    try {
      EncodedContext d = encode_node_descriptors(s.train, v, *s.llm, s.prompts);
      desc.prefix = d.text + " ";
      desc.edges = std::move(d.source_edges);
      desc.llm_cache_key = d.llm_cache_key;
      desc.fallback = d.fallback;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoDescribableContent) throw;
      out.stats.descriptors_missing = 1;
    }
  }

  auto trained = [&](const QASample& q) { return s.cfg.trains_on(q.task); };
  // Worst-case training sample of a partition, before any LLM rewrite.
  PartitionMeasure measure = [&](const Partition& p) {
    std::size_t worst = 0;
    for (const EncodedContext& enc : encode_base(s, p, 0)) {
      std::string context = desc.prefix + enc.text;
      for (const QASample& q : questions_for(s, enc)) {
        if (!trained(q)) continue;
        worst = std::max(worst, estimate_tokens(combine(context, q), s.budget.chars_per_token));
      }
    }
    return worst;
  };

  int rounds = 0;
  std::vector<Partition> parts;
  try {
    parts = fit_to_budget(ctx, s.cfg.n_max, s.budget, measure, &rounds);
  } catch (const Error& e) {
    throw Error(e.code(), "node '" + v.str() + "' partitioning: " + bare_message(e), e.line());
  }
  out.stats.max_rounds = rounds;
  out.stats.partitions = parts.size();

  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Partition& p = parts[i];
    const int index = static_cast<int>(i);
    try {
      for (EncodedContext& enc : encode_base(s, p, index)) {
        std::vector<QASample> qas = questions_for(s, enc);
        if (qas.empty()) continue;
        const bool any_trained = std::any_of(qas.begin(), qas.end(), trained);
        const bool needs_text = any_trained || s.cfg.eval_include_context;

        EncodedContext final_enc = enc;
        if (s.strategy.kind == StrategyKind::kSummarized && needs_text) {
          final_enc = encode_summarized(enc, *s.llm, s.prompts);
        } else if (s.strategy.kind == StrategyKind::kNodeDescriptors) {
          final_enc.strategy = s.strategy;
          final_enc.text = desc.prefix + enc.text;
          final_enc.fallback = desc.fallback;
          final_enc.llm_cache_key = desc.llm_cache_key;
        }

        for (QASample& q : qas) {
          if (s.cfg.paraphrase_questions) q = paraphrase_question(q, *s.llm, s.prompts);
          if (trained(q)) {
            TrainingSample t;
            t.context_text = final_enc.text;
            t.combined_text = combine(t.context_text, q);
            t.token_estimate = estimate_tokens(t.combined_text, s.budget.chars_per_token);
            t.center = v;
            t.partition_index = index;
            t.strategy = s.strategy.name();
            t.context_edges = final_enc.source_edges;
            t.context_edges.insert(t.context_edges.end(), desc.edges.begin(), desc.edges.end());
            std::sort(t.context_edges.begin(), t.context_edges.end());
            t.context_edges.erase(std::unique(t.context_edges.begin(), t.context_edges.end()),
                                  t.context_edges.end());
            t.llm_cache_key = final_enc.llm_cache_key;
            // LLM rewrites are measured after the fact.
            t.oversized = p.oversized ||
                          t.token_estimate > static_cast<std::size_t>(s.budget.t_max);
            t.fallback = final_enc.fallback || q.paraphrase_fallback;
            if (t.oversized) ++out.stats.oversized;
            if (t.fallback) ++out.stats.fallback;
            t.qa = q;
            out.train.push_back(std::move(t));
          }
          add_eval(s, std::move(q), final_enc.text, out);
        }
      }
    } catch (const Error& e) {
      throw Error(e.code(),
                  "node '" + v.str() + "' partition " + std::to_string(i) + ": " + bare_message(e),
                  e.line());
    }
  }
  return out;
}

// Runs fn(i) for i in [0, n) on `jobs` threads. The exception of the lowest
// failing index is rethrown, so failures do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i; !failed.load() && (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
    worker();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void merge_stats(BuildStats& into, const BuildStats& s) {
  into.nodes_visited += s.nodes_visited;
  into.partitions += s.partitions;
  into.oversized += s.oversized;
  into.fallback += s.fallback;
  into.mc_skipped += s.mc_skipped;
  into.descriptors_missing += s.descriptors_missing;
  into.max_rounds = std::max(into.max_rounds, s.max_rounds);
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& records) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    for (const json& r : records) {
      out << r.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string eval_file_name(TaskKind task, AnswerFormat format) {
  return "eval_" + std::string(to_string(task)) + "_" + std::string(to_string(format)) + ".jsonl";
}

std::vector<std::string> dataset_file_names() {
  std::vector<std::string> out{std::string(kTrainFile)};
  for (TaskKind t : kTasks) {
    for (AnswerFormat f : kFormats) out.push_back(eval_file_name(t, f));
  }
  out.emplace_back(kManifestFile);
  return out;
}

std::shared_ptr<LlmClient> make_llm_client(const LlmConfig& cfg,
                                           std::optional<std::filesystem::path> cache_dir) {
  std::shared_ptr<CompletionBackend> backend;
  if (cfg.backend == "stub") {
    auto stub = std::make_shared<StubBackend>();
    if (!cfg.fixtures_path.empty()) stub->load_fixtures(cfg.fixtures_path);
    backend = std::move(stub);
  } else if (cfg.backend == "remote") {
    backend = std::make_shared<RemoteBackend>(RemoteConfig::from_env());
  } else if (cfg.backend == "none") {
    backend = std::make_shared<DisabledBackend>();
  } else {
    throw Error(ErrorCode::kInvalidConfig, "llm backend must be stub|remote|none");
  }
  LlmClientOptions opts;
  opts.retry.base_delay = std::chrono::milliseconds(cfg.retry_base_ms);
  opts.retry.factor = cfg.retry_factor;
  opts.retry.max_attempts = cfg.retry_max_attempts;
  opts.max_in_flight = cfg.max_in_flight;
  opts.max_calls = cfg.max_calls;
  opts.cache_dir = std::move(cache_dir);
  return std::make_shared<LlmClient>(std::move(backend), std::move(opts));
}

Dataset generate_dataset(const KnowledgeGraph& graph, const RunConfig& cfg,
                         const BuildOptions& options) {
  cfg.validate();
  if (graph.empty()) throw Error(ErrorCode::kInvalidConfig, "graph has no nodes");

  Dataset ds;
  ds.split_applied = cfg.has_task(TaskKind::kMultiHop);
  if (ds.split_applied) {
    ds.split = split_edges(graph, cfg.split, cfg.seed);
  } else {
    ds.split.train_edges = graph.edges_sorted();
    ds.split.ratio = 1.0;
    ds.split.seed = cfg.seed;
  }
  // Training contexts only ever see training edges.
  const KnowledgeGraph train =
      ds.split_applied ? graph.with_edges(ds.split.train_edges) : KnowledgeGraph(graph);

  EncodingStrategy strategy = EncodingStrategy::parse(cfg.strategy, cfg.summarize_base);
  const bool needs_llm = strategy.kind == StrategyKind::kSummarized ||
                         strategy.kind == StrategyKind::kNodeDescriptors ||
                         cfg.paraphrase_questions;
  std::shared_ptr<LlmClient> llm = options.llm;
  if (!llm && needs_llm) llm = make_llm_client(cfg.llm, options.llm_cache_dir);

  Shared shared{graph,
                train,
                cfg,
                strategy,
                cfg.templates_path.empty() ? TemplateSet::builtin()
                                           : TemplateSet::load(cfg.templates_path),
                cfg.prompts_dir.empty() ? PromptSet::builtin() : PromptSet::load_dir(cfg.prompts_dir),
                TokenBudget{cfg.t_max, cfg.chars_per_token},
                llm.get(),
                DistractorPool(graph)};

  std::vector<const Node*> nodes = train.nodes_sorted();
  int jobs = options.jobs > 0 ? options.jobs
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  log::info("build_start", {{"nodes", nodes.size()},
                            {"edges", graph.edge_count()},
                            {"train_edges", ds.split.train_edges.size()},
                            {"strategy", strategy.name()},
                            {"jobs", jobs}});

  std::vector<NodeOutput> outputs(nodes.size());
  parallel_for(nodes.size(), jobs,
               [&](std::size_t i) { outputs[i] = process_node(shared, nodes[i]->id); });

  for (NodeOutput& o : outputs) {
    for (TrainingSample& t : o.train) ds.train.push_back(std::move(t));
    for (auto& [key, samples] : o.eval) {
      auto& dst = ds.eval[key];
      dst.insert(dst.end(), std::make_move_iterator(samples.begin()),
                 std::make_move_iterator(samples.end()));
    }
    merge_stats(ds.stats, o.stats);
  }
  outputs.clear();

  if (cfg.has_task(TaskKind::kMultiHop)) {
    MultihopResult mh = gen_multihop_qa(graph, ds.split, train, shared.templates);
    ds.stats.multihop = mh.report;
    NodeOutput sink;
    for (QASample& q : mh.samples) {
      if (cfg.paraphrase_questions) q = paraphrase_question(q, *llm, shared.prompts);
      // Held-out questions never carry a training context.
      add_eval(shared, std::move(q), "", sink);
    }
    for (auto& [key, samples] : sink.eval) ds.eval[key] = std::move(samples);
    ds.stats.mc_skipped += sink.stats.mc_skipped;
  }
  for (TaskKind t : kTasks) {
    for (AnswerFormat f : kFormats) ds.eval[{t, f}];  // every file exists, maybe empty
  }

  if (llm) {
    ds.backend_calls = llm->backend_calls();
    ds.cache_hits = llm->cache_hits();
  }

  json files = json::object();
  json eval_counts = json::object();
  files[std::string(kTrainFile)] = ds.train.size();
  for (const auto& [key, samples] : ds.eval) {
    files[eval_file_name(key.first, key.second)] = samples.size();
    eval_counts[std::string(to_string(key.first))][std::string(to_string(key.second))] =
        samples.size();
  }
  json train_counts = json::object();
  for (const TrainingSample& t : ds.train) {
    auto& c = train_counts[std::string(to_string(t.qa.task))];
    c = c.is_null() ? 1 : c.get<std::size_t>() + 1;
  }
  const MultihopReport& mr = ds.stats.multihop;
  ds.manifest = json{
      {"format", "kg2ft-dataset"},
      {"version", 1},
      {"tool", {{"name", "kg2ft"}, {"version", KG2FT_VERSION}}},
      {"graph",
       {{"path", cfg.graph_path},
        {"hash", graph_content_hash(graph)},
        {"nodes", graph.node_count()},
        {"edges", graph.edge_count()}}},
      {"config", cfg.to_json()},
      {"templates", {{"hash", shared.templates.content_hash()}}},
      {"prompts",
       {{"version", "v1"},
        {"original_wording", true},
        {"rewrite", shared.prompts.rewrite_hash()},
        {"topics", shared.prompts.topics_hash()},
        {"paraphrase", shared.prompts.paraphrase_hash()}}},
      {"llm", needs_llm ? json{{"backend_id", llm->backend_id()}} : json(nullptr)},
      {"split",
       {{"applied", ds.split_applied},
        {"ratio", cfg.split},
        {"seed", cfg.seed},
        {"train_edges", ds.split.train_edges.size()},
        {"test_edges", ds.split.test_edges.size()}}},
      {"files", files},
      {"samples", {{"train", train_counts}, {"eval", eval_counts}}},
      {"stats",
       {{"nodes_visited", ds.stats.nodes_visited},
        {"partitions", ds.stats.partitions},
        {"max_repartition_rounds", ds.stats.max_rounds},
        {"oversized", ds.stats.oversized},
        {"fallback", ds.stats.fallback},
        {"mc_skipped", ds.stats.mc_skipped},
        {"descriptors_missing", ds.stats.descriptors_missing},
        {"multihop",
         {{"test_edges", mr.test_edges},
          {"eligible", mr.eligible},
          {"skipped_disconnected", mr.skipped_disconnected},
          {"skipped_missing_lookup", mr.skipped_missing_lookup},
          {"skipped_no_co_heads", mr.skipped_no_co_heads},
          {"questions", mr.questions}}}}}};
  log::info("build_done", {{"train", ds.train.size()},
                           {"backend_calls", ds.backend_calls},
                           {"cache_hits", ds.cache_hits},
                           {"oversized", ds.stats.oversized},
                           {"fallback", ds.stats.fallback}});
  return ds;
}

json training_record(const TrainingSample& s) {
  json meta{{"center", s.center.str()},
            {"partition", s.partition_index},
            {"strategy", s.strategy},
            {"relation", s.qa.relation},
            {"source_edges", edges_json(s.context_edges)},
            {"qa_edges", edges_json(s.qa.source_edges)},
            {"token_estimate", s.token_estimate},
            {"oversized", s.oversized},
            {"fallback", s.fallback}};
  if (s.llm_cache_key) meta["llm_cache_key"] = *s.llm_cache_key;
  return json{{"text", s.combined_text},
              {"context", s.context_text},
              {"question", s.qa.question_text},
              {"answer", s.qa.answer_text},
              {"task", to_string(s.qa.task)},
              {"meta", meta}};
}

json eval_record(std::size_t id, const QASample& s) {
  json answer_nodes = json::array();
  for (const NodeId& n : s.answer_nodes) answer_nodes.push_back(n.str());
  json meta{{"center", s.center.str()},
            {"relation", s.relation},
            {"role", role_name(s.role)},
            {"anchor", s.anchor.str()},
            {"subject", s.subject.str()},
            {"answer_nodes", answer_nodes},
            {"source_edges", edges_json(s.source_edges)},
            {"paraphrase_fallback", s.paraphrase_fallback}};
  if (s.mc_seed) meta["mc_seed"] = *s.mc_seed;
  const bool mc = s.format == AnswerFormat::kMultipleChoice;
  return json{{"id", id},
              {"question", s.question_text},
              {"answer", s.answer_text},
              {"options", mc ? json(s.options) : json::array()},
              {"correct_index", mc ? json(s.correct_index) : json(nullptr)},
              {"task", to_string(s.task)},
              {"format", to_string(s.format)},
              {"meta", meta}};
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  // A manifest marks a finished run; remove it before touching anything.
  std::filesystem::remove(out_dir / kManifestFile);

  std::vector<json> train;
  train.reserve(dataset.train.size());
  for (const TrainingSample& t : dataset.train) train.push_back(training_record(t));
  write_lines(out_dir / kTrainFile, train);

  for (TaskKind t : kTasks) {
    for (AnswerFormat f : kFormats) {
      std::vector<json> records;
      auto it = dataset.eval.find({t, f});
      if (it != dataset.eval.end()) {
        for (std::size_t i = 0; i < it->second.size(); ++i) {
          records.push_back(eval_record(i, it->second[i]));
        }
      }
      write_lines(out_dir / eval_file_name(t, f), records);
    }
  }

  std::filesystem::path tmp = out_dir / (std::string(kManifestFile) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << dataset.manifest.dump(2, ' ', false, json::error_handler_t::replace) << '\n';
  }
  std::filesystem::rename(tmp, out_dir / kManifestFile);
}

Dataset build_dataset(const KnowledgeGraph& graph, const RunConfig& cfg,
                      const std::filesystem::path& out_dir, const BuildOptions& options) {
  Dataset ds = generate_dataset(graph, cfg, options);
  write_dataset(ds, out_dir);
  return ds;
}

// ---------------------------------------------------------------- stats

std::size_t DatasetStats::token_percentile(double q) const {
  if (token_estimates.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(token_estimates.size())));
  rank = std::clamp<std::size_t>(rank, 1, token_estimates.size());
  return token_estimates[rank - 1];
}

std::map<std::size_t, std::size_t> DatasetStats::token_histogram(std::size_t width) const {
  std::map<std::size_t, std::size_t> out;
  if (width == 0) width = 1;
  for (std::size_t t : token_estimates) {
    std::size_t upper = t == 0 ? 0 : ((t + width - 1) / width) * width;
    ++out[upper];
  }
  return out;
}

json DatasetStats::to_json() const {
  json hist = json::array();
  for (const auto& [upper, n] : token_histogram(32)) hist.push_back(json::array({upper, n}));
  json j{{"files", file_counts},
         {"by_task_format", task_format_counts},
         {"train", train_count},
         {"open", open_count},
         {"mc", mc_count},
         {"oversized", oversized},
         {"fallback", fallback},
         {"tokens",
          {{"p50", token_percentile(0.5)},
           {"p90", token_percentile(0.9)},
           {"p100", token_percentile(1.0)},
           {"histogram", hist}}}};
  j["manifest_matches"] = manifest_matches ? json(*manifest_matches) : json(nullptr);
  return j;
}

namespace {

[[noreturn]] void malformed(const std::filesystem::path& file, std::size_t line,
                            const std::string& why) {
  throw Error(ErrorCode::kMalformedSample, file.filename().string() + ": " + why, line);
}

void check_training(const json& r, const std::filesystem::path& file, std::size_t line,
                    double cpt, DatasetStats& st) {
  if (!r.contains("text") || !r["text"].is_string() || r["text"].get<std::string>().empty()) {
    malformed(file, line, "training record needs non-empty 'text'");
  }
  if (!r.contains("task") || !r["task"].is_string()) malformed(file, line, "missing 'task'");
  try {
    parse_task(r["task"].get<std::string>());
  } catch (const Error&) {
    malformed(file, line, "unknown task");
  }
  ++st.train_count;
  st.token_estimates.push_back(estimate_tokens(r["text"].get<std::string>(), cpt));
  if (r.contains("meta") && r["meta"].is_object()) {
    const json& m = r["meta"];
    if (m.value("oversized", false)) ++st.oversized;
    if (m.value("fallback", false)) ++st.fallback;
  }
}

void check_eval(const json& r, const std::filesystem::path& file, std::size_t line,
                DatasetStats& st) {
  for (const char* key : {"question", "answer", "task", "format"}) {
    if (!r.contains(key) || !r[key].is_string()) {
      malformed(file, line, std::string("missing string '") + key + "'");
    }
  }
  if (!r.contains("id") || !r["id"].is_number_integer()) malformed(file, line, "missing 'id'");
  if (!r.contains("options") || !r["options"].is_array()) malformed(file, line, "missing 'options'");
  TaskKind task;
  AnswerFormat format;
  try {
    task = parse_task(r["task"].get<std::string>());
    format = parse_format(r["format"].get<std::string>());
  } catch (const Error&) {
    malformed(file, line, "unknown task or format");
  }
  const json& options = r["options"];
  if (format == AnswerFormat::kMultipleChoice) {
    if (options.size() != 5) {
      malformed(file, line, "MC record has " + std::to_string(options.size()) + " options, not 5");
    }
    std::set<std::string> distinct;
    for (const json& o : options) {
      if (!o.is_string()) malformed(file, line, "non-string option");
      distinct.insert(text::normalize_answer(o.get<std::string>()));
    }
    if (distinct.size() != options.size()) malformed(file, line, "duplicate options");
    if (!r.contains("correct_index") || !r["correct_index"].is_number_integer()) {
      malformed(file, line, "MC record without correct_index");
    }
    int ci = r["correct_index"].get<int>();
    if (ci < 0 || ci >= static_cast<int>(options.size())) {
      malformed(file, line, "correct_index out of range");
    }
    if (options[static_cast<std::size_t>(ci)] != r["answer"]) {
      malformed(file, line, "options[correct_index] differs from answer");
    }
    ++st.mc_count;
  } else {
    if (!options.empty()) malformed(file, line, "open record with options");
    ++st.open_count;
  }
  ++st.task_format_counts[std::string(to_string(task)) + "/" + std::string(to_string(format))];
}

void scan_file(const std::filesystem::path& file, double cpt, DatasetStats& st) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + file.string());
  std::string line;
  std::size_t n = 0, records = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    json r = json::parse(line, nullptr, false);
    if (r.is_discarded() || !r.is_object()) malformed(file, n, "not a JSON object");
    if (r.contains("text")) {
      check_training(r, file, n, cpt, st);
    } else {
      check_eval(r, file, n, st);
    }
    ++records;
  }
  st.file_counts[file.filename().string()] = records;
}

}  // namespace

DatasetStats dataset_stats(const std::filesystem::path& path, double chars_per_token) {
  DatasetStats st;
  if (!std::filesystem::is_directory(path)) {
    scan_file(path, chars_per_token, st);
  } else {
    std::optional<json> manifest;
    if (std::filesystem::exists(path / kManifestFile)) {
      std::ifstream in(path / kManifestFile, std::ios::binary);
      json m = json::parse(in, nullptr, false);
      if (m.is_discarded()) {
        throw Error(ErrorCode::kMalformedSample, "manifest.json is not valid JSON");
      }
      manifest = std::move(m);
      chars_per_token = manifest->value("/config/chars_per_token"_json_pointer, chars_per_token);
    }
    for (const std::string& name : dataset_file_names()) {
      if (name == kManifestFile) continue;
      if (std::filesystem::exists(path / name)) scan_file(path / name, chars_per_token, st);
    }
    if (manifest && manifest->contains("files")) {
      bool ok = true;
      for (const auto& [name, count] : (*manifest)["files"].items()) {
        auto it = st.file_counts.find(name);
        ok = ok && it != st.file_counts.end() && it->second == count.get<std::size_t>();
      }
      st.manifest_matches = ok;
    }
  }
  std::sort(st.token_estimates.begin(), st.token_estimates.end());
  return st;
}

}  // namespace kg2ft
