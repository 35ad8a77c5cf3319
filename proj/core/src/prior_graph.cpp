#include "eigenprior/prior_graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "eigenprior/errors.hpp"

namespace eigenprior {

namespace {

// Splits "a<TAB>b" into exactly two non-empty fields.
bool split_pair(const std::string& line, std::string& a, std::string& b) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) return false;
  a = line.substr(0, tab);
  b = line.substr(tab + 1);
  return !a.empty() && !b.empty();
}

bool skip_line(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line.empty() || line.front() == '#';
}

}  // namespace

LemmaMap read_lemma_map(std::istream& in) {
  LemmaMap map;
  std::string line, surface, base;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    if (!split_pair(line, surface, base)) {
      throw InputError("lemma map line " + std::to_string(line_no) +
                       ": expected surface<TAB>base");
    }
    map[surface] = base;
  }
  return map;
}

LemmaMap load_lemma_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open lemma map: " + path);
  return read_lemma_map(in);
}

PriorGraph PriorGraph::from_edges(std::size_t vertex_count,
                                  std::span<const std::pair<WordId, WordId>> edges) {
  PriorGraph g(vertex_count);
  for (const auto& [a, b] : edges) {
    EIGENPRIOR_REQUIRE(a < vertex_count && b < vertex_count, "edge endpoint out of range");
    if (a == b) continue;
    g.adjacency_[a].push_back(b);
    g.adjacency_[b].push_back(a);
  }
  std::size_t directed = 0;
  for (auto& list : g.adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    directed += list.size();
  }
  g.edge_count_ = directed / 2;
  return g;
}

std::size_t PriorGraph::degree(WordId id) const {
  EIGENPRIOR_REQUIRE(id < adjacency_.size(), "graph vertex out of range");
  return adjacency_[id].size();
}

std::span<const WordId> PriorGraph::neighbors(WordId id) const {
  EIGENPRIOR_REQUIRE(id < adjacency_.size(), "graph vertex out of range");
  return adjacency_[id];
}

bool PriorGraph::connected(WordId a, WordId b) const {
  if (a >= adjacency_.size() || b >= adjacency_.size()) return false;
  const auto& list = adjacency_[a];
  return std::binary_search(list.begin(), list.end(), b);
}

EdgeLoadReport read_edges(std::istream& in, const Vocabulary& vocab, const LemmaMap* lemma_map) {
  const auto base_of = [&](const std::string& w) -> const std::string& {
    if (lemma_map) {
      if (const auto it = lemma_map->find(w); it != lemma_map->end()) return it->second;
    }
    return w;
  };

  // base form -> every vocabulary id whose surface form reduces to it
  std::unordered_map<std::string, std::vector<WordId>> surfaces;
  if (lemma_map) {
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      surfaces[base_of(vocab.words()[i])].push_back(static_cast<WordId>(i));
    }
  }
  const auto resolve = [&](const std::string& w) -> std::vector<WordId> {
    if (lemma_map) {
      const auto it = surfaces.find(base_of(w));
      return it == surfaces.end() ? std::vector<WordId>{} : it->second;
    }
    WordId id;
    if (vocab.lookup(w, id)) return {id};
    return {};
  };

  EdgeLoadReport report;
  std::vector<std::pair<WordId, WordId>> edges;
  std::string line, a, b;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    if (!split_pair(line, a, b)) {
      throw InputError("edge list line " + std::to_string(line_no) +
                       ": expected word1<TAB>word2");
    }
    ++report.lines;
    const auto left = resolve(a);
    const auto right = resolve(b);
    if (left.empty() || right.empty()) {
      ++report.unresolved_lines;
      continue;
    }
    for (const WordId i : left) {
      for (const WordId j : right) edges.emplace_back(i, j);
    }
  }
  report.graph = PriorGraph::from_edges(vocab.size(), edges);
  return report;
}

EdgeLoadReport load_edges(const std::string& path, const Vocabulary& vocab,
                          const LemmaMap* lemma_map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open edge list: " + path);
  return read_edges(in, vocab, lemma_map);
}

}  // namespace eigenprior
