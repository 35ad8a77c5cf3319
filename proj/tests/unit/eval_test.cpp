#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "eigenprior/errors.hpp"
#include "eigenprior/eval.hpp"
#include "oracles.hpp"

namespace ep = eigenprior;
using ep::DenseMatrix;
using ep::DenseVector;

namespace {

ep::EmbeddingSet make_set(std::vector<std::string> words, DenseMatrix vectors) {
  ep::EmbeddingSet e;
  e.words = ep::WordIndex(std::move(words));
  e.vectors = std::move(vectors);
  return e;
}

ep::EmbeddingSet random_set(std::size_t n, Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::string> words;
  DenseMatrix v(static_cast<Eigen::Index>(n), dim);
  for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = g(rng);
  return make_set(std::move(words), std::move(v));
}

ep::SimilarityDataset parse_sim(const std::string& text) {
  std::istringstream in(text);
  return ep::read_similarity_dataset(in);
}

ep::Vocabulary vocab_of(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  return ep::Vocabulary(words, std::vector<std::uint64_t>(words.size(), 1));
}

}  // namespace

TEST(Cosine, Examples) {
  DenseVector a(2), b(2), c(2), z = DenseVector::Zero(2);
  a << 1, 0;
  b << 0, 1;
  c << -2, 0;
  EXPECT_EQ(ep::cosine(a, a), 1.0);
  EXPECT_EQ(ep::cosine(a, b), 0.0);
  EXPECT_EQ(ep::cosine(a, c), -1.0);
  EXPECT_EQ(ep::cosine(a, z), 0.0);
  EXPECT_THROW(ep::cosine(a, DenseVector::Ones(3)), ep::ContractViolation);
}

TEST(Spearman, Examples) {
  const std::vector<double> x{1, 2, 3, 4}, y{10, 20, 30, 40}, r{4, 3, 2, 1};
  EXPECT_NEAR(ep::spearman(x, y), 1.0, 1e-15);
  EXPECT_NEAR(ep::spearman(x, r), -1.0, 1e-15);
}

TEST(Spearman, TiesMatchDefinition) {
  const std::vector<double> x{1, 2, 2, 4}, y{1, 3, 2, 4};
  EXPECT_EQ(ep::average_ranks(x), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_NEAR(ep::spearman(x, y), oracle::spearman_by_definition(x, y), 1e-14);

  std::mt19937 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(12), b(12);
    for (auto& v : a) v = static_cast<double>(rng() % 5);
    for (auto& v : b) v = static_cast<double>(rng() % 7);
    if (std::adjacent_find(a.begin(), a.end(), std::not_equal_to<>()) == a.end()) continue;
    if (std::adjacent_find(b.begin(), b.end(), std::not_equal_to<>()) == b.end()) continue;
    EXPECT_EQ(ep::average_ranks(a), oracle::ranks_by_definition(a));
    EXPECT_NEAR(ep::spearman(a, b), oracle::spearman_by_definition(a, b), 1e-12);
  }
}

TEST(Spearman, ConstantInputIsUndefined) {
  const std::vector<double> x{2, 2, 2}, y{1, 2, 3};
  try {
    ep::spearman(x, y);
    FAIL();
  } catch (const ep::InputError& e) {
    EXPECT_STREQ(e.what(), "undefined correlation");
  }
}

TEST(Spearman, InvariantUnderMonotoneMaps) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  std::vector<double> x(30), y(30), fx(30);
  for (int i = 0; i < 30; ++i) {
    x[i] = u(rng);
    y[i] = x[i] + u(rng);
    fx[i] = std::exp(3.0 * x[i]) - 7.0;
  }
  EXPECT_NEAR(ep::spearman(x, y), ep::spearman(fx, y), 1e-14);
}

TEST(SimilarityDataset, ParsesTabsAndWhitespace) {
  const auto ds = parse_sim("# comment\r\nold new\tx\t3.5\r\n\nA  b 1e1\n");
  ASSERT_EQ(ds.pairs.size(), 2u);
  EXPECT_EQ(ds.pairs[0].first, "old new");
  EXPECT_EQ(ds.pairs[0].score, 3.5);
  EXPECT_EQ(ds.pairs[1].second, "b");
  EXPECT_EQ(ds.pairs[1].score, 10.0);
}

TEST(SimilarityDataset, RejectsMalformedLines) {
  try {
    parse_sim("a\tb\t1\nc\td\tx\n");
    FAIL();
  } catch (const ep::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("similarity line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_sim("a b\n"), ep::InputError);
  EXPECT_THROW(parse_sim("a b 1\n"), ep::InputError);
  EXPECT_THROW(parse_sim("a b nan\nc d 1\n"), ep::InputError);
}

TEST(EvalSimilarity, PerfectAgreementAndCaseFallback) {
  DenseMatrix v(4, 2);
  v << 1, 0, 1, 0.1, 0, 1, -1, 0.2;
  const auto emb = make_set({"a", "b", "c", "d"}, v);
  const auto ds = parse_sim("a b 9\nA c 5\na d 1\na zz 3\n");
  const auto r = ep::eval_similarity(emb, ds);
  EXPECT_NEAR(r.rho, 1.0, 1e-15);
  EXPECT_EQ(r.covered, 3u);
  EXPECT_EQ(r.total, 4u);
}

TEST(EvalSimilarity, InsufficientCoverage) {
  const auto emb = random_set(3, 2, 1);
  try {
    ep::eval_similarity(emb, parse_sim("x y 1\np q 2\nw0 w1 3\n"));
    FAIL();
  } catch (const ep::InputError& e) {
    EXPECT_STREQ(e.what(), "insufficient coverage");
  }
}

TEST(EvalSimilarity, RandomEmbeddingsCentreOnZero) {
  // Resampling random vectors against fixed scores: the mean correlation is
  // close to zero.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  ep::SimilarityDataset ds;
  for (int i = 0; i < 40; ++i) ds.pairs.push_back({"w" + std::to_string(i), "w" + std::to_string(i + 40), u(rng)});
  double sum = 0.0;
  for (int r = 0; r < 1000; ++r) sum += ep::eval_similarity(random_set(80, 5, 1000 + r), ds).rho;
  EXPECT_LE(std::abs(sum / 1000.0), 0.1);
}

TEST(EvalSimilarity, InvariantUnderRotation) {
  auto emb = random_set(20, 4, 3);
  ep::SimilarityDataset ds;
  for (int i = 0; i < 10; ++i) ds.pairs.push_back({"w" + std::to_string(i), "w" + std::to_string(19 - i), static_cast<double>(i * i % 7)});
  const double before = ep::eval_similarity(emb, ds).rho;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix q(4, 4);
  for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = g(rng);
  q = ep::orthonormalize(q);
  emb.vectors = emb.vectors * q;
  EXPECT_NEAR(ep::eval_similarity(emb, ds).rho, before, 1e-12);
}

TEST(Analogy, QueryWordExclusion) {
  DenseMatrix v(3, 2);
  v << 1, 0, 0, 1, 0.7, 0.7;
  const auto emb = make_set({"a", "b", "c"}, v);
  ep::AnalogyOptions keep;
  keep.exclude_query_words = false;
  EXPECT_EQ(ep::solve_analogy(emb, "a", "b", "a", keep), "b");
  EXPECT_EQ(ep::solve_analogy(emb, "a", "b", "a"), "c");
  EXPECT_EQ(ep::solve_analogy(emb, "a", "b", "nope"), std::nullopt);
}

TEST(Analogy, PlantedOffsetRecovered) {
  DenseMatrix v = DenseMatrix::Zero(6, 6);
  for (int i = 0; i < 6; ++i) v(i, i) = 1.0;
  v.row(3) = v.row(1) - v.row(0) + v.row(2);  // d = b - a + c
  const auto emb = make_set({"a", "b", "c", "d", "e", "f"}, v);
  EXPECT_EQ(ep::solve_analogy(emb, "a", "b", "c"), "d");
}

TEST(Analogy, MatchesBruteForceScan) {
  const auto emb = random_set(50, 8, 6);
  const ep::AnalogySolver solver(emb);
  std::mt19937 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t a = rng() % 50, b = rng() % 50, c = rng() % 50;
    const DenseVector t = (emb.vectors.row(b) - emb.vectors.row(a) + emb.vectors.row(c)).transpose();
    std::size_t best = 0;
    double best_cos = -2.0;
    for (std::size_t r = 0; r < 50; ++r) {
      if (r == a || r == b || r == c) continue;
      const double cs = ep::cosine(emb.vectors.row(r).transpose(), t);
      if (cs > best_cos + 1e-12) {
        best_cos = cs;
        best = r;
      }
    }
    EXPECT_EQ(solver.solve_rows(a, b, c), best);
  }
}

TEST(Analogy, GlobalScalingInvariance) {
  auto emb = random_set(30, 5, 9);
  const auto before = ep::solve_analogy(emb, "w1", "w2", "w3");
  emb.vectors *= 1000.0;
  EXPECT_EQ(ep::solve_analogy(emb, "w1", "w2", "w3"), before);
}

TEST(EvalAnalogy, AccuracyCoverageAndShuffle) {
  DenseMatrix v = DenseMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) v(i, i) = 1.0;
  v.row(3) = v.row(1) - v.row(0) + v.row(2);
  v.row(7) = v.row(5) - v.row(4) + v.row(6);
  const auto emb = make_set({"a", "b", "c", "d", "e", "f", "g", "h"}, v);
  std::istringstream in(": one\na b c d\ne f g h\n: two\nx y z w\nA B C D\n");
  auto ds = ep::read_analogy_dataset(in);
  EXPECT_EQ(ds.sections, 2u);
  ep::AnalogyOptions o;
  o.threads = 3;
  const auto r = ep::eval_analogy(emb, ds, o);
  EXPECT_EQ(r.total, 4u);
  EXPECT_EQ(r.covered, 3u);
  EXPECT_EQ(r.correct, 3u);
  EXPECT_EQ(r.accuracy, 1.0);

  std::reverse(ds.questions.begin(), ds.questions.end());
  const auto shuffled = ep::eval_analogy(emb, ds);
  EXPECT_EQ(shuffled.correct, r.correct);
  EXPECT_EQ(shuffled.covered, r.covered);

  std::istringstream oov("p q r s\n");
  EXPECT_THROW(ep::eval_analogy(emb, ep::read_analogy_dataset(oov)), ep::InputError);
  std::istringstream bad("a b c\n");
  EXPECT_THROW(ep::read_analogy_dataset(bad), ep::InputError);
}

TEST(GraphOnly, TwoCliquesSeparate) {
  const auto vocab = vocab_of({"a1", "a2", "a3", "b1", "b2", "b3"});
  std::vector<std::pair<ep::WordId, ep::WordId>> edges{{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}};
  const auto g = ep::PriorGraph::from_edges(6, edges);
  const auto e = ep::graph_only_embed(g, vocab, 2, {});
  EXPECT_EQ(e.meta.kind, "graph");
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double c = ep::cosine(e.vectors.row(i).transpose(), e.vectors.row(j).transpose());
      if (i / 3 == j / 3) {
        EXPECT_NEAR(c, 1.0, 1e-8);
      } else {
        EXPECT_NEAR(c, 0.0, 1e-8);
      }
    }
  }
}

TEST(GraphOnly, SingleEdge) {
  // Singular values of [[0,1],[1,0]] are both 1, so any unit vector in the
  // plane is a valid rank-1 factor.
  const auto vocab = vocab_of({"a", "b"});
  std::vector<std::pair<ep::WordId, ep::WordId>> edges{{0, 1}};
  const auto e = ep::graph_only_embed(ep::PriorGraph::from_edges(2, edges), vocab, 1, {});
  EXPECT_NEAR(e.vectors.col(0).squaredNorm(), 1.0, 1e-10);
}

TEST(GraphOnly, FullRankReconstructsAdjacency) {
  const auto vocab = vocab_of({"a", "b", "c", "d", "e"});
  std::vector<std::pair<ep::WordId, ep::WordId>> edges{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {0, 2}};
  const auto g = ep::PriorGraph::from_edges(5, edges);
  DenseMatrix adj = DenseMatrix::Zero(5, 5);
  for (const auto& [i, j] : edges) adj(i, j) = adj(j, i) = 1.0;
  const auto e = ep::graph_only_embed(g, vocab, 5, {});
  // Rows of U S^{1/2}: their Gram matrix is U S U^T, which equals |A|'s
  // spectral factor; compare singular values instead of signs.
  const DenseVector s = ep::dense_svd(adj).S;
  const DenseVector norms = e.vectors.colwise().squaredNorm().transpose();
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(norms[j], s[j], 1e-8);
}

TEST(GraphOnly, Contracts) {
  const auto vocab = vocab_of({"a", "b", "c"});
  try {
    ep::graph_only_embed(ep::PriorGraph(3), vocab, 1, {});
    FAIL();
  } catch (const ep::InputError& e) {
    EXPECT_STREQ(e.what(), "no edges");
  }
  std::vector<std::pair<ep::WordId, ep::WordId>> edges{{0, 1}};
  const auto g = ep::PriorGraph::from_edges(3, edges);
  EXPECT_THROW(ep::graph_only_embed(g, vocab, 4, {}), ep::ContractViolation);
  EXPECT_THROW(ep::graph_only_embed(g, vocab, 0, {}), ep::ContractViolation);
}
