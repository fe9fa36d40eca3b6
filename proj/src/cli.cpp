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

#include "kg2ft/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "kg2ft/config.hpp"
#include "kg2ft/error.hpp"
#include "kg2ft/eval.hpp"
#include "kg2ft/graph_io.hpp"
#include "kg2ft/ingest.hpp"
#include "kg2ft/log.hpp"
#include "kg2ft/pipeline.hpp"

#ifndef KG2FT_VERSION
#define KG2FT_VERSION "0.0.0"
#endif

namespace kg2ft::cli {
namespace {

using nlohmann::json;

struct IngestArgs {
  std::string format;
  std::string input;
  std::string relations;
  int min_authors = 2;
  std::string delimiter = "tab";
  std::string default_type = "entity";
  bool skip_malformed = false;
  std::string out;
};

// Build flags; each is applied over the config only when given.
struct BuildArgs {
  std::string config;
  std::string graph;
  std::string strategy;
  std::string summarize_base;
  std::string tasks;
  std::string formats;
  std::string train_tasks;
  double split = 0.7;
  std::uint64_t seed = 0;
  int k = 1;
  int n_max = 30;
  int t_max = 256;
  double chars_per_token = 4.0;
  int n_distractors = 4;
  bool eval_include_context = false;
  bool paraphrase = false;
  std::string templates;
  std::string prompts;
  std::string llm_backend;
  std::string llm_cache;
  std::size_t llm_max_calls = 0;
  int llm_max_in_flight = 4;
  std::string llm_fixtures;
  int jobs = 0;
  std::string out;
};

struct StatsArgs {
  std::string dataset;
  std::string report;
  double chars_per_token = 4.0;
};

struct EvalArgs {
  std::string dataset;
  std::string responses;
  std::string metric;
  std::string report;
};

struct RespondArgs {
  std::string dataset;
  std::string kind;
  std::uint64_t seed = 0;
  std::string out;
};

void print_json(const json& j) {
  std::cout << j.dump(2, ' ', false, json::error_handler_t::replace) << std::endl;
}

json report_json(const IngestReport& r) {
  return json{{"rows_read", r.rows_read},       {"rows_kept", r.rows_kept},
              {"rows_dropped", r.rows_dropped}, {"rows_malformed", r.rows_malformed},
              {"duplicates", r.duplicates},     {"self_loops", r.self_loops}};
}

int do_ingest(const IngestArgs& a) {
  IngestResult result;
  if (a.format == "triples") {
    TripleFileSpec spec;
    spec.path = a.input;
    if (a.delimiter == "tab" || a.delimiter == "\\t") {
      spec.delimiter = '\t';
    } else if (a.delimiter.size() == 1) {
      spec.delimiter = a.delimiter[0];
    } else {
      throw Error(ErrorCode::kInvalidConfig, "delimiter must be one character or 'tab'");
    }
    if (!a.relations.empty()) spec.relation_allow_list = split_list(a.relations);
    spec.default_node_type = a.default_type;
    spec.skip_malformed = a.skip_malformed;
    result = load_triples(spec);
  } else {
    result = load_papers(a.input, a.min_authors);
  }
  save_graph(result.graph, a.out);
  json summary = report_json(result.report);
  summary["nodes"] = result.graph.node_count();
  summary["edges"] = result.graph.edge_count();
  summary["relations"] = result.graph.relations();
  summary["graph_hash"] = graph_content_hash(result.graph);
  summary["out"] = a.out;
  log::info("ingest_done", summary);
  print_json(summary);
  return 0;
}

int do_build(const BuildArgs& a, CLI::App& cmd) {
  auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
  RunConfig cfg = a.config.empty() ? RunConfig{} : RunConfig::load(a.config);
  json sources = json::object();
  auto set = [&](const char* flag, const char* key, auto& field, const auto& value) {
    if (given(flag)) {
      field = value;
      sources[key] = "flag";
    } else {
      sources[key] = a.config.empty() ? "default" : "config";
    }
  };
  set("--graph", "graph_path", cfg.graph_path, a.graph);
  set("--strategy", "strategy", cfg.strategy, a.strategy);
  set("--summarize-base", "summarize_base", cfg.summarize_base, a.summarize_base);
  set("--tasks", "tasks", cfg.tasks, split_list(a.tasks));
  set("--formats", "formats", cfg.formats, split_list(a.formats));
  if (given("--train-tasks")) {
    cfg.train_tasks = split_list(a.train_tasks);
    sources["train_tasks"] = "flag";
  } else if (given("--tasks")) {
    cfg.train_tasks.clear();  // re-derive from the new task list
    sources["train_tasks"] = "default";
  }
  set("--split", "split", cfg.split, a.split);
  set("--seed", "seed", cfg.seed, a.seed);
  set("--k", "k", cfg.k, a.k);
  set("--n-max", "n_max", cfg.n_max, a.n_max);
  set("--t-max", "t_max", cfg.t_max, a.t_max);
  set("--chars-per-token", "chars_per_token", cfg.chars_per_token, a.chars_per_token);
  set("--n-distractors", "n_distractors", cfg.n_distractors, a.n_distractors);
  set("--eval-include-context", "eval_include_context", cfg.eval_include_context,
      a.eval_include_context);
  set("--paraphrase-questions", "paraphrase_questions", cfg.paraphrase_questions, a.paraphrase);
  set("--templates", "templates_path", cfg.templates_path, a.templates);
  set("--prompts", "prompts_dir", cfg.prompts_dir, a.prompts);
  set("--llm-backend", "llm.backend", cfg.llm.backend, a.llm_backend);
  set("--llm-fixtures", "llm.fixtures_path", cfg.llm.fixtures_path, a.llm_fixtures);
  set("--llm-max-in-flight", "llm.max_in_flight", cfg.llm.max_in_flight, a.llm_max_in_flight);
  if (given("--llm-max-calls")) {
    cfg.llm.max_calls = a.llm_max_calls;
    sources["llm.max_calls"] = "flag";
  }
  if (cfg.graph_path.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no graph: pass --graph or a config with graph_path");
  }
  cfg.validate();
  log::info("config", {{"config", cfg.to_json()}, {"sources", sources}});

  KnowledgeGraph graph = load_graph(cfg.graph_path);
  BuildOptions options;
  options.jobs = a.jobs;
  if (!a.llm_cache.empty()) options.llm_cache_dir = a.llm_cache;
  Dataset ds = build_dataset(graph, cfg, a.out, options);
  print_json(json{{"out", a.out},
                  {"files", ds.manifest["files"]},
                  {"stats", ds.manifest["stats"]},
                  {"backend_calls", ds.backend_calls},
                  {"cache_hits", ds.cache_hits}});
  return 0;
}

int do_stats(const StatsArgs& a) {
  if (!a.report.empty()) {
    ScoreReport r = ScoreReport::load(a.report);
    std::cout << r.summary() << std::endl;
    return 0;
  }
  DatasetStats st = dataset_stats(a.dataset, a.chars_per_token);
  print_json(st.to_json());
  if (st.manifest_matches && !*st.manifest_matches) {
    throw Error(ErrorCode::kMalformedSample, "manifest counts differ from file line counts");
  }
  return 0;
}

int do_eval(const EvalArgs& a) {
  std::vector<EvalItem> items = load_eval_file(a.dataset);
  std::vector<ModelResponse> responses = load_responses(a.responses);
  ScoreReport r;
  if (a.metric == "mc") {
    r = score_mc(items, responses);
  } else if (a.metric == "exact") {
    r = score_exact(items, responses);
  } else {
    r = score_token_f1(items, responses);
  }
  if (!a.report.empty()) r.save(a.report);
  log::info("eval_done", {{"metric", r.metric}, {"n", r.n}});
  std::cout << r.summary() << std::endl;
  return 0;
}

int do_respond(const RespondArgs& a) {
  std::vector<EvalItem> items = load_eval_file(a.dataset);
  write_responses(reference_responder(parse_responder(a.kind), items, a.seed), a.out);
  log::info("respond_done", {{"kind", a.kind}, {"n", items.size()}, {"out", a.out}});
  return 0;
}

void emit_error(const std::string& code, const std::string& message,
                std::optional<std::size_t> line = std::nullopt) {
  json rec{{"level", "error"}, {"event", "error"}, {"code", code}, {"message", message}};
  if (line) rec["line"] = *line;
  std::cerr << rec.dump(-1, ' ', false, json::error_handler_t::replace) << std::endl;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"kg2ft: compile a knowledge graph into fine-tuning and evaluation datasets", "kg2ft"};
  app.set_version_flag("--version", KG2FT_VERSION);
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.footer(
      "Open-ended answers can also be scored semantically with the optional Python scorer:\n"
      "  python -m kg2ft.semantic --dataset FILE --responses FILE --model NAME "
      "--batch-size N --report out.json");
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "debug|info|warn|error|off (logs go to stderr)")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

  IngestArgs ia;
  CLI::App* ingest = app.add_subcommand("ingest", "Parse a triple or paper file into graph.kgz");
  ingest->add_option("--format", ia.format, "Input format")
      ->required()
      ->check(CLI::IsMember({"triples", "papers"}));
  ingest->add_option("--input", ia.input, "Input file")->required();
  ingest->add_option("--relations", ia.relations, "Relation allow-list, comma-separated (triples)");
  ingest->add_option("--min-authors", ia.min_authors, "Drop papers with fewer authors (papers)")
      ->capture_default_str();
  ingest->add_option("--delimiter", ia.delimiter, "Column delimiter: one character or 'tab'")
      ->capture_default_str();
  ingest->add_option("--default-type", ia.default_type, "node_type when no type column is given")
      ->capture_default_str();
  ingest->add_flag("--skip-malformed", ia.skip_malformed,
                   "Count short rows instead of failing (triples)");
  ingest->add_option("--out", ia.out, "Output graph.kgz")->required();

  BuildArgs ba;
  CLI::App* build = app.add_subcommand("build", "Generate training and evaluation files");
  build->add_option("--config", ba.config, "Config file or a previous manifest.json");
  build->add_option("--graph", ba.graph, "graph.kgz from ingest");
  build->add_option("--strategy", ba.strategy, "Context encoding")
      ->check(CLI::IsMember({"triples", "groups", "adjacency", "summarized", "descriptors"}));
  build->add_option("--summarize-base", ba.summarize_base, "Base encoding for summarized")
      ->check(CLI::IsMember({"triples", "groups", "adjacency"}));
  build->add_option("--tasks", ba.tasks, "Comma list of fact,inverse,multihop");
  build->add_option("--formats", ba.formats, "Comma list of open,mc");
  build->add_option("--train-tasks", ba.train_tasks,
                    "Tasks written to train.jsonl (default: enabled of fact,inverse)");
  build->add_option("--split", ba.split, "Training edge ratio when multihop is enabled");
  build->add_option("--seed", ba.seed, "Seed for the split and MC sampling");
  build->add_option("--k", ba.k, "Neighbourhood radius");
  build->add_option("--n-max", ba.n_max, "Node budget per partition");
  build->add_option("--t-max", ba.t_max, "Token budget per sample");
  build->add_option("--chars-per-token", ba.chars_per_token, "Token estimator divisor");
  build->add_option("--n-distractors", ba.n_distractors, "Wrong options per MC question");
  build->add_flag("--eval-include-context,!--no-eval-include-context", ba.eval_include_context,
                  "Prefix eval questions with their context");
  build->add_flag("--paraphrase-questions,!--no-paraphrase-questions", ba.paraphrase,
                  "Reword questions through the LLM");
  build->add_option("--templates", ba.templates, "Template file (default: shipped)");
  build->add_option("--prompts", ba.prompts, "Prompt directory (default: shipped)");
  build->add_option("--llm-backend", ba.llm_backend, "LLM backend")
      ->check(CLI::IsMember({"remote", "stub", "none"}));
  build->add_option("--llm-cache", ba.llm_cache, "Response cache directory");
  build->add_option("--llm-max-calls", ba.llm_max_calls, "Backend call ceiling per run");
  build->add_option("--llm-max-in-flight", ba.llm_max_in_flight, "Concurrent backend calls");
  build->add_option("--llm-fixtures", ba.llm_fixtures, "Stub fixtures, JSON [[substring, reply]]");
  build->add_option("--jobs", ba.jobs, "Worker threads (default: all cores)");
  build->add_option("--out", ba.out, "Output directory")->required();

  StatsArgs sa;
  CLI::App* stats = app.add_subcommand("stats", "Summarize a dataset or print a score report");
  auto* ds_opt = stats->add_option("--dataset", sa.dataset, "Dataset directory or .jsonl file");
  auto* rep_opt = stats->add_option("--report", sa.report, "Score report to print");
  ds_opt->excludes(rep_opt);
  stats->add_option("--chars-per-token", sa.chars_per_token,
                    "Estimator divisor when no manifest is present")
      ->capture_default_str();

  EvalArgs ea;
  CLI::App* eval = app.add_subcommand("eval", "Score a response file against an eval file");
  eval->add_option("--dataset", ea.dataset, "eval_*.jsonl")->required();
  eval->add_option("--responses", ea.responses, "Response file")->required();
  eval->add_option("--metric", ea.metric, "Metric")
      ->required()
      ->check(CLI::IsMember({"mc", "exact", "token-f1"}));
  eval->add_option("--report", ea.report, "Write the JSON score report here");

  RespondArgs ra;
  CLI::App* respond = app.add_subcommand("respond", "Write reference responses for an eval file");
  respond->add_option("--dataset", ra.dataset, "eval_*.jsonl")->required();
  respond->add_option("--kind", ra.kind, "Responder")
      ->required()
      ->check(CLI::IsMember({"gold", "random", "blank"}));
  respond->add_option("--seed", ra.seed, "Seed for the random responder")->capture_default_str();
  respond->add_option("--out", ra.out, "Response file")->required();

  try {
    app.parse(argc, argv);
    if (stats->parsed() && sa.dataset.empty() && sa.report.empty()) {
      throw CLI::RequiredError("--dataset or --report");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help() << std::flush;
    return 2;
  }

  try {
    log::set_level(log::parse_level(log_level));
    if (ingest->parsed()) return do_ingest(ia);
    if (build->parsed()) return do_build(ba, *build);
    if (stats->parsed()) return do_stats(sa);
    if (eval->parsed()) return do_eval(ea);
    if (respond->parsed()) return do_respond(ra);
  } catch (const Error& e) {
    emit_error(std::string(to_string(e.code())), e.what(), e.line());
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    emit_error("Io", e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("Internal", e.what());
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace kg2ft::cli
