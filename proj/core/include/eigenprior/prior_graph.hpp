#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eigenprior/corpus.hpp"

namespace eigenprior {

// Surface form -> base form, e.g. the output of an offline stemmer.
using LemmaMap = std::unordered_map<std::string, std::string>;

LemmaMap read_lemma_map(std::istream& in);
LemmaMap load_lemma_map(const std::string& path);

// Undirected, unweighted similarity graph over vocabulary ids. Symmetric, no
// self loops, neighbor lists sorted. Immutable once built.
class PriorGraph {
 public:
  PriorGraph() = default;
  explicit PriorGraph(std::size_t vertex_count) : adjacency_(vertex_count) {}

  // Builds from an edge list; duplicates and self loops are discarded and
  // both directions are stored. Throws ContractViolation on ids >= n.
  static PriorGraph from_edges(std::size_t vertex_count,
                               std::span<const std::pair<WordId, WordId>> edges);

  std::size_t vertex_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool empty() const { return edge_count_ == 0; }

  std::size_t degree(WordId id) const;
  std::span<const WordId> neighbors(WordId id) const;
  bool connected(WordId a, WordId b) const;

  bool operator==(const PriorGraph& other) const = default;

 private:
  std::vector<std::vector<WordId>> adjacency_;
  std::size_t edge_count_ = 0;
};

struct EdgeLoadReport {
  PriorGraph graph;
  std::size_t lines = 0;            // non-comment, non-blank lines
  std::size_t unresolved_lines = 0; // at least one side had no vocabulary match
};

// Reads `word1<TAB>word2` lines ('#' comments and blank lines skipped).
//
// With a lemma map, each side is reduced to its base form and expanded back
// to every in-vocabulary surface form sharing that base, so an edge between
// bases connects all of their surface forms. Unresolvable lines are counted,
// not fatal. Malformed lines throw InputError naming the line number.
EdgeLoadReport read_edges(std::istream& in, const Vocabulary& vocab,
                          const LemmaMap* lemma_map = nullptr);
EdgeLoadReport load_edges(const std::string& path, const Vocabulary& vocab,
                          const LemmaMap* lemma_map = nullptr);

}  // namespace eigenprior
