#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "eigenprior/errors.hpp"
#include "eigenprior/prior_graph.hpp"

namespace ep = eigenprior;

namespace {

ep::Vocabulary vocab_of(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  return ep::Vocabulary(words, std::vector<std::uint64_t>(words.size(), 1));
}

ep::WordId id(const ep::Vocabulary& v, std::string_view w) {
  ep::WordId i = 0;
  EXPECT_TRUE(v.lookup(w, i)) << w;
  return i;
}

}  // namespace

TEST(LoadEdges, DedupAndSelfLoops) {
  const auto v = vocab_of({"a", "b"});
  std::istringstream in("a\tb\nb\ta\na\ta\n");
  const auto r = ep::read_edges(in, v);
  EXPECT_EQ(r.graph.edge_count(), 1u);
  EXPECT_EQ(r.lines, 3u);
  ASSERT_EQ(r.graph.neighbors(id(v, "a")).size(), 1u);
  EXPECT_EQ(r.graph.neighbors(id(v, "a"))[0], id(v, "b"));
}

TEST(LoadEdges, OovWordIsSkippedAndCounted) {
  const auto v = vocab_of({"a", "b"});
  std::istringstream in("a\tzzz\n");
  const auto r = ep::read_edges(in, v);
  EXPECT_EQ(r.graph.edge_count(), 0u);
  EXPECT_EQ(r.unresolved_lines, 1u);
}

TEST(LoadEdges, LemmaExpansion) {
  const auto v = vocab_of({"cars", "auto", "car"});
  std::istringstream lemmas("cars\tcar\n");
  const auto map = ep::read_lemma_map(lemmas);
  std::istringstream in("car\tauto\n");
  const auto g = ep::read_edges(in, v, &map).graph;
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.connected(id(v, "car"), id(v, "auto")));
  EXPECT_TRUE(g.connected(id(v, "cars"), id(v, "auto")));
  EXPECT_FALSE(g.connected(id(v, "cars"), id(v, "car")));
}

TEST(LoadEdges, CommentsAndBlankLines) {
  const auto v = vocab_of({"a", "b", "c"});
  std::istringstream in("# synonyms\n\na\tb\n# b\tc\n");
  const auto r = ep::read_edges(in, v);
  EXPECT_EQ(r.lines, 1u);
  EXPECT_EQ(r.graph.edge_count(), 1u);
}

TEST(LoadEdges, MalformedLineNamesLineNumber) {
  const auto v = vocab_of({"a", "b"});
  std::istringstream in("a\tb\n# ok\njust-one-field\n");
  try {
    ep::read_edges(in, v);
    FAIL();
  } catch (const ep::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Degree, PathGraph) {
  const std::vector<std::pair<ep::WordId, ep::WordId>> edges{{0, 1}, {1, 2}};
  const auto g = ep::PriorGraph::from_edges(3, edges);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_THROW(g.degree(3), ep::ContractViolation);
  const ep::PriorGraph empty(4);
  EXPECT_EQ(empty.degree(2), 0u);
}

TEST(PriorGraph, InvariantsOnRandomEdgeLists) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 25;
    std::vector<std::pair<ep::WordId, ep::WordId>> edges;
    for (int e = 0; e < 60; ++e) edges.emplace_back(rng() % n, rng() % n);
    const auto g = ep::PriorGraph::from_edges(n, edges);
    std::size_t degree_sum = 0;
    for (ep::WordId i = 0; i < n; ++i) {
      degree_sum += g.degree(i);
      EXPECT_FALSE(g.connected(i, i));
      const auto nb = g.neighbors(i);
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      for (const auto j : nb) EXPECT_TRUE(g.connected(j, i));
    }
    EXPECT_EQ(degree_sum, 2 * g.edge_count());

    std::shuffle(edges.begin(), edges.end(), rng);
    EXPECT_EQ(ep::PriorGraph::from_edges(n, edges), g);
  }
}

TEST(LoadEdges, PermutedRowsGiveSameGraph) {
  const auto v = vocab_of({"a", "b", "c", "d"});
  std::istringstream in1("a\tb\nc\td\nb\tc\n"), in2("b\tc\na\tb\nd\tc\n");
  EXPECT_EQ(ep::read_edges(in1, v).graph, ep::read_edges(in2, v).graph);
}
