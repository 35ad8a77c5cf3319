#include "eigenprior/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "eigenprior/errors.hpp"
#include "parallel.hpp"

namespace eigenprior {

namespace {

std::string ascii_lowercase(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

bool resolve_word(const WordIndex& index, const std::string& word, std::size_t& row) {
  return index.lookup(word, row) || index.lookup(ascii_lowercase(word), row);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find('\t') != std::string::npos) {
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      out.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return out;
  }
  std::istringstream ss(line);
  std::string field;
  while (ss >> field) out.push_back(field);
  return out;
}

}  // namespace

double cosine(const Eigen::Ref<const DenseVector>& u, const Eigen::Ref<const DenseVector>& v) {
  EIGENPRIOR_REQUIRE(u.size() == v.size(), "cosine: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  EIGENPRIOR_REQUIRE(xs.size() == ys.size(), "spearman: length mismatch");
  EIGENPRIOR_REQUIRE(xs.size() >= 2, "spearman: need at least two values");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw InputError("undefined correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SimilarityDataset read_similarity_dataset(std::istream& in) {
  SimilarityDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = split_fields(line);
    if (f.size() != 3 || f[0].empty() || f[1].empty()) {
      throw InputError("similarity line " + std::to_string(line_no) +
                       ": expected word1<TAB>word2<TAB>score");
    }
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("similarity line " + std::to_string(line_no) + ": bad score '" + f[2] + "'");
    }
    if (!std::isfinite(score)) {
      throw InputError("similarity line " + std::to_string(line_no) + ": score is not finite");
    }
    ds.pairs.push_back({f[0], f[1], score});
  }
  if (ds.pairs.size() < 2) throw InputError("similarity dataset needs at least 2 pairs");
  return ds;
}

SimilarityDataset load_similarity_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open similarity dataset: " + path);
  return read_similarity_dataset(in);
}

SimilarityResult eval_similarity(const EmbeddingSet& emb, const SimilarityDataset& dataset) {
  SimilarityResult res;
  res.total = dataset.pairs.size();
  std::vector<double> model, human;
  for (const auto& p : dataset.pairs) {
    std::size_t r1, r2;
    if (!resolve_word(emb.words, p.first, r1) || !resolve_word(emb.words, p.second, r2)) continue;
    model.push_back(cosine(emb.vectors.row(static_cast<Eigen::Index>(r1)).transpose(),
                           emb.vectors.row(static_cast<Eigen::Index>(r2)).transpose()));
    human.push_back(p.score);
  }
  res.covered = model.size();
  if (res.covered < 2) throw InputError("insufficient coverage");
  res.rho = spearman(model, human);
  return res;
}

AnalogyDataset read_analogy_dataset(std::istream& in) {
  AnalogyDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == ':') {
      ++ds.sections;
      continue;
    }
    std::istringstream ss(line);
    AnalogyQuestion q;
    std::string extra;
    if (!(ss >> q.a >> q.b >> q.c >> q.d) || (ss >> extra)) {
      throw InputError("analogy line " + std::to_string(line_no) + ": expected 'a b c d'");
    }
    ds.questions.push_back(std::move(q));
  }
  return ds;
}

AnalogyDataset load_analogy_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open analogy dataset: " + path);
  return read_analogy_dataset(in);
}

AnalogySolver::AnalogySolver(const EmbeddingSet& emb, AnalogyOptions options)
    : emb_(&emb), options_(options), unit_rows_(emb.vectors) {
  emb.validate();
  for (Eigen::Index r = 0; r < unit_rows_.rows(); ++r) {
    const double n = unit_rows_.row(r).norm();
    if (n > 0.0) unit_rows_.row(r) /= n;
  }
}

bool AnalogySolver::resolve(const std::string& word, std::size_t& row) const {
  return resolve_word(emb_->words, word, row);
}

std::optional<std::size_t> AnalogySolver::solve_rows(std::size_t a, std::size_t b,
                                                     std::size_t c) const {
  const auto& v = emb_->vectors;
  const auto ia = static_cast<Eigen::Index>(a);
  const auto ib = static_cast<Eigen::Index>(b);
  const auto ic = static_cast<Eigen::Index>(c);
  EIGENPRIOR_REQUIRE(ia < v.rows() && ib < v.rows() && ic < v.rows(), "analogy row out of range");
  DenseVector target = (v.row(ib) - v.row(ia) + v.row(ic)).transpose();
  const double norm = target.norm();
  if (norm > 0.0) target /= norm;
  const DenseVector scores = unit_rows_ * target;

  std::optional<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < scores.size(); ++r) {
    if (options_.exclude_query_words && (r == ia || r == ib || r == ic)) continue;
    if (scores[r] > best_score) {
      best_score = scores[r];
      best = static_cast<std::size_t>(r);
    }
  }
  return best;
}

std::optional<std::string> AnalogySolver::solve(const std::string& a, const std::string& b,
                                                const std::string& c) const {
  std::size_t ra, rb, rc;
  if (!resolve(a, ra) || !resolve(b, rb) || !resolve(c, rc)) return std::nullopt;
  const auto row = solve_rows(ra, rb, rc);
  if (!row) return std::nullopt;
  return emb_->words.word(*row);
}

std::optional<std::string> solve_analogy(const EmbeddingSet& emb, const std::string& a,
                                         const std::string& b, const std::string& c,
                                         AnalogyOptions options) {
  return AnalogySolver(emb, options).solve(a, b, c);
}

AnalogyResult eval_analogy(const EmbeddingSet& emb, const AnalogyDataset& dataset,
                           AnalogyOptions options) {
  const AnalogySolver solver(emb, options);
  AnalogyResult res;
  res.total = dataset.questions.size();
  std::vector<char> covered(res.total, 0), correct(res.total, 0);
  detail::parallel_blocks(res.total, options.threads,
                          [&](std::size_t begin, std::size_t end, unsigned) {
                            for (std::size_t i = begin; i < end; ++i) {
                              const auto& q = dataset.questions[i];
                              std::size_t ra, rb, rc, rd;
                              if (!solver.resolve(q.a, ra) || !solver.resolve(q.b, rb) ||
                                  !solver.resolve(q.c, rc) || !solver.resolve(q.d, rd)) {
                                continue;
                              }
                              covered[i] = 1;
                              const auto got = solver.solve_rows(ra, rb, rc);
                              correct[i] = got && *got == rd;
                            }
                          });
  for (std::size_t i = 0; i < res.total; ++i) {
    res.covered += static_cast<std::size_t>(covered[i]);
    res.correct += static_cast<std::size_t>(correct[i]);
  }
  if (res.covered == 0) throw InputError("no analogy question is covered by the vocabulary");
  res.accuracy = static_cast<double>(res.correct) / static_cast<double>(res.covered);
  return res;
}

EmbeddingSet graph_only_embed(const PriorGraph& graph, const Vocabulary& vocab, Eigen::Index m,
                              const TruncatedSvdOptions& svd) {
  EIGENPRIOR_REQUIRE(graph.vertex_count() == vocab.size(), "graph and vocabulary sizes differ");
  EIGENPRIOR_REQUIRE(m >= 1 && static_cast<std::size_t>(m) <= vocab.size(),
                     "embedding dimension must be in [1, |H|]");
  if (graph.empty()) throw InputError("no edges");
  std::vector<Triplet> triplets;
  triplets.reserve(2 * graph.edge_count());
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    for (const WordId j : graph.neighbors(static_cast<WordId>(i))) triplets.push_back({i, j, 1.0});
  }
  const auto adjacency =
      SparseMatrix::from_triplets(vocab.size(), vocab.size(), std::move(triplets));
  TruncatedSvdOptions options = svd;
  options.rank = m;
  TruncatedSvdReport report;
  const SvdFactors f = truncated_svd(adjacency, options, &report);

  EmbeddingSet emb;
  emb.words = WordIndex(vocab);
  emb.vectors = f.U * f.S.cwiseSqrt().asDiagonal();
  emb.meta.kind = "graph";
  emb.meta.dim = m;
  emb.meta.seed = svd.seed;
  emb.meta.sqrt_transform = false;
  emb.meta.d1_projection = false;
  emb.meta.svd_iterations = report.iterations;
  emb.meta.svd_converged = report.converged;
  return emb;
}

}  // namespace eigenprior
