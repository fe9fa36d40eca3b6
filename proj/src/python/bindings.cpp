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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <tuple>

#include "json.hpp"

#include "kg2ft/error.hpp"
#include "kg2ft/eval.hpp"
#include "kg2ft/graph_io.hpp"
#include "kg2ft/ingest.hpp"
#include "kg2ft/log.hpp"
#include "kg2ft/pipeline.hpp"
#include "kg2ft/text.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python side sees plain dicts.
py::object to_py(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict ingest_triples(const std::string& input, const std::string& out,
                        std::optional<std::vector<std::string>> relations) {
  kg2ft::TripleFileSpec spec;
  spec.path = input;
  spec.relation_allow_list = std::move(relations);
  kg2ft::IngestResult r = kg2ft::load_triples(spec);
  kg2ft::save_graph(r.graph, out);
  py::dict d;
  d["rows_read"] = r.report.rows_read;
  d["rows_kept"] = r.report.rows_kept;
  d["rows_dropped"] = r.report.rows_dropped;
  d["nodes"] = r.graph.node_count();
  d["edges"] = r.graph.edge_count();
  d["graph_hash"] = kg2ft::graph_content_hash(r.graph);
  return d;
}

py::object build(const py::object& config, const std::string& out, int jobs,
                 std::optional<std::string> llm_cache) {
  kg2ft::RunConfig cfg = kg2ft::RunConfig::from_json(from_py(config));
  cfg.validate();
  kg2ft::BuildOptions options;
  options.jobs = jobs;
  if (llm_cache) options.llm_cache_dir = *llm_cache;
  kg2ft::Dataset ds;
  {
    py::gil_scoped_release release;
    ds = kg2ft::build_dataset(kg2ft::load_graph(cfg.graph_path), cfg, out, options);
  }
  return to_py(ds.manifest);
}

py::object score(const std::string& dataset, const std::string& responses,
                 const std::string& metric) {
  auto items = kg2ft::load_eval_file(dataset);
  auto resp = kg2ft::load_responses(responses);
  if (metric == "mc") return to_py(kg2ft::score_mc(items, resp).to_json());
  if (metric == "exact") return to_py(kg2ft::score_exact(items, resp).to_json());
  if (metric == "token-f1") return to_py(kg2ft::score_token_f1(items, resp).to_json());
  throw kg2ft::Error(kg2ft::ErrorCode::kInvalidConfig, "unknown metric " + metric);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "kg2ft core: ingest, build and score knowledge-graph datasets";
  m.attr("__version__") = KG2FT_VERSION;

  // Lives as long as the interpreter; the module holds the other reference.
  static PyObject* error = py::exception<kg2ft::Error>(m, "KgError").inc_ref().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const kg2ft::Error& e) {
      py::object exc = py::handle(error)(e.what());
      exc.attr("code") = std::string(kg2ft::to_string(e.code()));
      PyErr_SetObject(error, exc.ptr());
    }
  });

  m.def("set_log_level", [](const std::string& level) {
    static const std::map<std::string, kg2ft::log::Level> levels{
        {"debug", kg2ft::log::Level::kDebug}, {"info", kg2ft::log::Level::kInfo},
        {"warn", kg2ft::log::Level::kWarn},   {"error", kg2ft::log::Level::kError},
        {"off", kg2ft::log::Level::kOff}};
    kg2ft::log::set_level(levels.at(level));
  });
  m.def("ingest_triples", &ingest_triples, py::arg("input"), py::arg("out"),
        py::arg("relations") = py::none());
  m.def("build", &build, py::arg("config"), py::arg("out"), py::arg("jobs") = 1,
        py::arg("llm_cache") = py::none(),
        "Build a dataset from a config dict (or manifest); returns the manifest.");
  m.def("score", &score, py::arg("dataset"), py::arg("responses"), py::arg("metric"));
  m.def("dataset_stats",
        [](const std::string& path) { return to_py(kg2ft::dataset_stats(path).to_json()); });
  m.def("token_f1", [](const std::string& response, const std::string& answer) {
    kg2ft::TokenF1 t = kg2ft::token_f1(response, answer);
    return std::make_tuple(t.precision, t.recall, t.f1);
  });
  m.def("normalize_answer", [](const std::string& s) { return kg2ft::text::normalize_answer(s); });
}
