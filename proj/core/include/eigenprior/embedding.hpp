#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eigenprior/corpus.hpp"
#include "eigenprior/linalg.hpp"

namespace eigenprior {

// Row labels of an embedding matrix. Unlike Vocabulary it carries no
// frequency ordering, so it also covers context slots and files written by
// other tools.
class WordIndex {
 public:
  WordIndex() = default;
  explicit WordIndex(std::vector<std::string> words);
  explicit WordIndex(const Vocabulary& vocab) : WordIndex(vocab.words()) {}

  std::size_t size() const { return words_.size(); }
  const std::string& word(std::size_t row) const { return words_.at(row); }
  const std::vector<std::string>& words() const { return words_; }
  bool lookup(std::string_view word, std::size_t& row) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> row_of_;
};

struct EmbeddingMeta {
  std::string kind = "cca";  // "cca", "cca-context" or "graph"
  Eigen::Index dim = 0;
  double alpha = 0.0;
  std::size_t window = 0;    // k
  std::size_t window_n = 0;  // N
  bool sqrt_transform = true;
  bool d1_projection = true;
  std::uint64_t seed = 0;
  std::string corpus_fingerprint;
  int svd_iterations = 0;
  bool svd_converged = true;
};

// Row i of `vectors` is the embedding of words.word(i).
struct EmbeddingSet {
  WordIndex words;
  DenseMatrix vectors;
  EmbeddingMeta meta;

  // Throws ContractViolation if shapes disagree or entries are not finite.
  void validate() const;
};

// word2vec text format: "<rows> <dim>" then "word v1 ... vm", values at 17
// significant digits so a reload reproduces the doubles exactly.
void write_word2vec(std::ostream& out, const EmbeddingSet& emb);
EmbeddingSet read_word2vec(std::istream& in);
void save_word2vec(const std::string& path, const EmbeddingSet& emb);
EmbeddingSet load_word2vec(const std::string& path);

// JSON sidecar (`<embeddings>.meta.json`).
std::string embedding_meta_path(const std::string& embedding_path);
void save_embedding_meta(const std::string& path, const EmbeddingMeta& meta);
EmbeddingMeta load_embedding_meta(const std::string& path);

}  // namespace eigenprior
