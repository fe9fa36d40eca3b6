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

#include "kg2ft/graph_io.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "kg2ft/error.hpp"
#include "kg2ft/hash.hpp"
#include "kg2ft/text.hpp"

namespace kg2ft {
namespace {

using nlohmann::json;

std::string line_of(const json& j) { return j.dump() + "\n"; }

}  // namespace

std::string serialize_graph(const KnowledgeGraph& graph) {
  std::string out;
  out += line_of(json{{"format", "kg2ft-graph"},
                      {"version", kGraphFormatVersion},
                      {"relations", graph.relations().size()},
                      {"nodes", graph.node_count()},
                      {"edges", graph.edge_count()}});
  for (const std::string& r : graph.relations()) out += line_of(json::array({"relation", r}));
  for (const Node* n : graph.nodes_sorted()) {
    json attrs = json::array();
    for (const auto& [k, v] : n->attributes) attrs.push_back(json::array({k, v}));
    out += line_of(json::array({"node", n->id.str(), n->label, n->node_type, attrs}));
  }
  for (const Edge& e : graph.edges_sorted()) {
    out += line_of(json::array({"edge", e.head.str(), e.relation, e.tail.str()}));
  }
  return out;
}

KnowledgeGraph deserialize_graph(std::string_view body) {
  KnowledgeGraph g;
  std::istringstream in{std::string(body)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t relations = 0, nodes = 0, edges = 0;
  json header;
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kMalformedRecord, "graph file: " + why, line_no);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw bad("invalid JSON");
    try {
      if (line_no == 1) {
        if (!j.is_object() || j.value("format", "") != "kg2ft-graph") {
          throw bad("missing kg2ft-graph header");
        }
        if (j.value("version", 0) != kGraphFormatVersion) {
          throw bad("unsupported version " + j.value("version", json()).dump());
        }
        header = j;
        continue;
      }
      if (!j.is_array() || j.empty()) throw bad("expected array record");
      const std::string kind = j.at(0).get<std::string>();
      if (kind == "relation") {
        g.register_relation(j.at(1).get<std::string>());
        ++relations;
      } else if (kind == "node") {
        Attributes attrs;
        for (const json& kv : j.at(4)) {
          attrs.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
        }
        g.add_node(Node{NodeId(j.at(1).get<std::string>()), j.at(2).get<std::string>(),
                        j.at(3).get<std::string>(), std::move(attrs)});
        ++nodes;
      } else if (kind == "edge") {
        g.add_edge(Edge{NodeId(j.at(1).get<std::string>()), j.at(2).get<std::string>(),
                        NodeId(j.at(3).get<std::string>())});
        ++edges;
      } else {
        throw bad("unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw bad(e.what());
    }
  }
  if (header.is_null()) throw Error(ErrorCode::kEmptyFile, "graph file has no header");
  if (header.value("relations", 0u) != relations || header.value("nodes", 0u) != nodes ||
      header.value("edges", 0u) != edges) {
    throw Error(ErrorCode::kMalformedRecord, "graph file: header counts do not match body");
  }
  return g;
}

std::string graph_content_hash(const KnowledgeGraph& graph) {
  return sha256_hex(serialize_graph(graph));
}

std::string gzip_compress(std::string_view data) {
  z_stream zs{};
  // 15 window bits + 16 selects the gzip wrapper; zlib writes mtime 0.
  if (deflateInit2(&zs, 9, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorCode::kIo, "deflateInit2 failed");
  }
  std::string out;
  out.resize(deflateBound(&zs, static_cast<uLong>(data.size())) + 32);
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorCode::kIo, "deflate failed");
  out.resize(zs.total_out);
  return out;
}

std::string gzip_decompress(std::string_view data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw Error(ErrorCode::kIo, "inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 16];
  int rc;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(ErrorCode::kMalformedRecord, "graph file: corrupt gzip stream");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
  } while (rc != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& path) {
  std::string bytes = gzip_compress(serialize_graph(graph));
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

KnowledgeGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
      static_cast<unsigned char>(bytes[1]) == 0x8b) {
    bytes = gzip_decompress(bytes);
  }
  return deserialize_graph(bytes);
}

}  // namespace kg2ft
