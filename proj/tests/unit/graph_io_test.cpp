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
#include <fstream>
#include <random>

#include "kg2ft/error.hpp"
#include "kg2ft/graph_io.hpp"
#include "test_graphs.hpp"

namespace kg2ft {
namespace {

void expect_same(const KnowledgeGraph& a, const KnowledgeGraph& b) {
  ASSERT_EQ(a.node_count(), b.node_count());
  EXPECT_EQ(a.relations(), b.relations());
  EXPECT_EQ(a.edges_sorted(), b.edges_sorted());
  auto na = a.nodes_sorted();
  auto nb = b.nodes_sorted();
  for (std::size_t i = 0; i < na.size(); ++i) {
    EXPECT_EQ(na[i]->id, nb[i]->id);
    EXPECT_EQ(na[i]->label, nb[i]->label);
    EXPECT_EQ(na[i]->node_type, nb[i]->node_type);
    EXPECT_EQ(na[i]->attributes, nb[i]->attributes);
  }
}

KnowledgeGraph with_attributes() {
  KnowledgeGraph g = testing::random_graph(9, 20, 40);
  g.add_node(Node{NodeId("paper:1"), "A \"quoted\" title\xC3\xA6", "paper",
                  {{"abstract", "Line one.\nLine two."}, {"year", "2020"}}});
  return g;
}

TEST(GraphIo, RoundTrip) {
  KnowledgeGraph g = with_attributes();
  expect_same(g, deserialize_graph(serialize_graph(g)));
}

TEST(GraphIo, OutputIgnoresInsertionOrder) {
  KnowledgeGraph g = testing::random_graph(4, 30, 60);
  KnowledgeGraph shuffled;
  for (const auto& r : g.relations()) shuffled.register_relation(r);
  std::vector<Node> nodes(g.nodes().begin(), g.nodes().end());
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  std::mt19937_64 rng(2);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  std::shuffle(edges.begin(), edges.end(), rng);
  for (auto& n : nodes) shuffled.add_node(n);
  for (auto& e : edges) shuffled.add_edge(e);
  EXPECT_EQ(serialize_graph(g), serialize_graph(shuffled));
  EXPECT_EQ(graph_content_hash(g), graph_content_hash(shuffled));
  shuffled.add_node(Node{NodeId("extra"), "Extra", "drug", {}});
  EXPECT_NE(graph_content_hash(g), graph_content_hash(shuffled));
}

TEST(GraphIo, FilesPlainAndGzip) {
  KnowledgeGraph g = with_attributes();
  auto dir = testing::temp_dir("graph_io");
  save_graph(g, dir / "g.jsonl.gz");
  expect_same(g, load_graph(dir / "g.jsonl.gz"));
  {
    std::ofstream plain(dir / "g.jsonl", std::ios::binary);
    plain << serialize_graph(g);
  }
  expect_same(g, load_graph(dir / "g.jsonl"));
  // Saved graphs are always gzip, with a fixed header so bytes are stable.
  std::string raw = testing::read_file(dir / "g.jsonl.gz");
  ASSERT_GE(raw.size(), 2u);
  EXPECT_EQ(static_cast<unsigned char>(raw[0]), 0x1f);
  EXPECT_EQ(static_cast<unsigned char>(raw[1]), 0x8b);
  save_graph(g, dir / "again.gz");
  EXPECT_EQ(testing::read_file(dir / "again.gz"), raw);
  std::filesystem::remove_all(dir);
}

TEST(GraphIo, Gzip) {
  std::string big(100000, 'x');
  EXPECT_EQ(gzip_decompress(gzip_compress(big)), big);
  EXPECT_EQ(gzip_decompress(gzip_compress("")), "");
  EXPECT_THROW(gzip_decompress("definitely not gzip"), Error);
}

TEST(GraphIo, RejectsBadInput) {
  auto code = [](std::string_view body) {
    try {
      deserialize_graph(body);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidConfig;
  };
  EXPECT_EQ(code("{\"format\":\"other\"}\n"), ErrorCode::kMalformedRecord);
  EXPECT_EQ(code("{\"format\":\"kg2ft-graph\",\"version\":9}\n"), ErrorCode::kMalformedRecord);
  std::string good = serialize_graph(testing::star(2));
  EXPECT_EQ(code(good + "not json\n"), ErrorCode::kMalformedRecord);
  // Header counts must match the body.
  EXPECT_EQ(code(good.substr(0, good.rfind("[\"edge\""))), ErrorCode::kMalformedRecord);
  try {
    load_graph("/nonexistent/graph.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace kg2ft
