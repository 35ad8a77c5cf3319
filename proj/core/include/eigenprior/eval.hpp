#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eigenprior/embedding.hpp"
#include "eigenprior/prior_graph.hpp"

namespace eigenprior {

// <u, v> / (|u| |v|), or 0 when either norm is 0.
double cosine(const Eigen::Ref<const DenseVector>& u, const Eigen::Ref<const DenseVector>& v);

// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of the average-rank vectors. Throws InputError
// ("undefined correlation") when either input is constant.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct SimilarityPair {
  std::string first;
  std::string second;
  double score;
};

struct SimilarityDataset {
  std::vector<SimilarityPair> pairs;
};

// `word1<TAB>word2<TAB>score` per line; lines without tabs may use any
// whitespace. Needs at least two pairs with finite scores.
SimilarityDataset read_similarity_dataset(std::istream& in);
SimilarityDataset load_similarity_dataset(const std::string& path);

struct SimilarityResult {
  double rho = 0.0;
  std::size_t covered = 0;
  std::size_t total = 0;
};

// Spearman correlation between embedding cosines and human scores over the
// pairs whose words both resolve (exact match first, then ASCII-lowercased).
// Throws InputError("insufficient coverage") below two covered pairs.
SimilarityResult eval_similarity(const EmbeddingSet& emb, const SimilarityDataset& dataset);

struct AnalogyQuestion {
  std::string a, b, c, d;
};

struct AnalogyDataset {
  std::vector<AnalogyQuestion> questions;
  std::size_t sections = 0;  // ':'-prefixed header lines
};

AnalogyDataset read_analogy_dataset(std::istream& in);
AnalogyDataset load_analogy_dataset(const std::string& path);

struct AnalogyOptions {
  bool exclude_query_words = true;
  unsigned threads = 1;
};

// Vector-offset solver over unit-normalized rows: returns the row maximizing
// cosine with v_b - v_a + v_c, lower row id on ties.
class AnalogySolver {
 public:
  explicit AnalogySolver(const EmbeddingSet& emb, AnalogyOptions options = {});

  std::optional<std::size_t> solve_rows(std::size_t a, std::size_t b, std::size_t c) const;
  // std::nullopt when a query word is out of vocabulary.
  std::optional<std::string> solve(const std::string& a, const std::string& b,
                                   const std::string& c) const;
  bool resolve(const std::string& word, std::size_t& row) const;

 private:
  const EmbeddingSet* emb_;
  AnalogyOptions options_;
  DenseMatrix unit_rows_;
};

std::optional<std::string> solve_analogy(const EmbeddingSet& emb, const std::string& a,
                                         const std::string& b, const std::string& c,
                                         AnalogyOptions options = {});

struct AnalogyResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t covered = 0;
  std::size_t total = 0;
};

// Throws InputError when no question is fully in vocabulary.
AnalogyResult eval_analogy(const EmbeddingSet& emb, const AnalogyDataset& dataset,
                           AnalogyOptions options = {});

// Embeddings from the prior graph alone: rank-m factorization of the 0/1
// adjacency matrix, rows of U diag(S)^{1/2}. Throws InputError("no edges").
EmbeddingSet graph_only_embed(const PriorGraph& graph, const Vocabulary& vocab, Eigen::Index m,
                              const TruncatedSvdOptions& svd);

}  // namespace eigenprior
