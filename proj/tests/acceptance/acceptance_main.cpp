// Acceptance suite: one PASS/FAIL line per numbered check, nonzero exit if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "eigenprior/accumulate.hpp"
#include "eigenprior/cca.hpp"
#include "eigenprior/errors.hpp"
#include "eigenprior/eval.hpp"
#include "eigenprior/verify.hpp"
#include "oracles.hpp"

namespace ep = eigenprior;

namespace {

constexpr std::uint64_t kSeed = 20160601;

constexpr double kTolUniformLaplacian = 1e-9;
constexpr double kTolDistanceIdentity = 1e-9;
constexpr double kTolDominance = 1e-8;
constexpr double kTolSvd = 1e-6;
constexpr double kWithinFraction = 0.95;

constexpr double kLimitUniformLaplacian = 1.0;
constexpr double kLimitDistanceIdentity = 1.0;
constexpr double kLimitDominance = 30.0;
constexpr double kLimitAccumulation = 5.0;
constexpr double kLimitSvd = 10.0;
constexpr double kLimitEval = 1.0;

struct Outcome {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::printf("%s  %d  %s  %s\n", o.passed ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.passed) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome from_check(const ep::CheckResult& r, double pinned_tol, double limit_s) {
  Outcome o;
  o.passed = r.passed && r.worst <= pinned_tol && r.tolerance == pinned_tol && r.seconds < limit_s;
  o.detail = fmt("instances=%zu worst=%.3g tol=%.0e time=%.3fs limit=%.0fs", r.instances, r.worst,
                 pinned_tol, r.seconds, limit_s);
  if (!r.passed) o.detail += " violated: " + r.detail;
  return o;
}

// ---- empty graph reduces to plain CCA ---------------------------------------

Outcome reduction_check() {
  std::mt19937_64 rng(kSeed);
  const std::size_t h = 60;
  std::vector<std::string> tokens;
  std::geometric_distribution<std::size_t> zipfish(0.08);
  for (int i = 0; i < 20000; ++i) {
    const std::size_t w = std::min(zipfish(rng), h - 1);
    tokens.push_back(fmt("w%03zu", w));
  }
  const auto vocab = ep::build_vocab(tokens, 1000, ep::OovPolicy::kDrop);
  const auto ids = ep::map_tokens(tokens, vocab);

  ep::AccumulateOptions opts;
  const ep::PriorGraph empty(vocab.size());
  ep::CorpusAccumulator with_graph(vocab, &empty, opts);
  with_graph.add_ids(ids);
  const auto stats = with_graph.finish();
  ep::CorpusAccumulator plain_acc(vocab, nullptr, opts);
  plain_acc.add_ids(ids);
  const auto plain = plain_acc.finish();

  ep::EmbedOptions eo;
  eo.dim = 10;
  eo.svd.seed = kSeed;
  eo.alpha = 0.0;
  const auto reference = ep::embed(plain, vocab, eo).words.vectors;
  Outcome o;
  o.passed = !stats.has_prior() && stats == plain;
  std::size_t checked = 0;
  for (const double alpha : {0.0, 0.1, 0.2, 0.5, 0.7, 0.9, 1.0}) {
    eo.alpha = alpha;
    const auto v = ep::embed(stats, vocab, eo).words.vectors;
    const bool same = v.rows() == reference.rows() && v.cols() == reference.cols() &&
                      std::memcmp(v.data(), reference.data(), sizeof(double) * v.size()) == 0;
    o.passed = o.passed && same;
    ++checked;
  }
  o.detail = fmt("alphas=%zu |H|=%zu bit-identical=%s", checked, vocab.size(), o.passed ? "yes" : "no");
  return o;
}

// ---- two-group corpus -------------------------------------------------------

struct TwoGroupCorpus {
  ep::Vocabulary vocab;
  std::vector<ep::WordId> ids;
  std::vector<int> group;  // per vocabulary id, -1 for planted words
};

// A two-state Markov chain over groups; each token is a uniform draw from
// the current group, so every word in a group has the same expected
// contexts. Optionally plants "syn_a" (group 0 only) and "syn_b" (group 1
// only).
TwoGroupCorpus make_two_group_corpus(std::uint64_t seed, std::size_t tokens, bool plant) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 19);
  std::vector<std::string> stream;
  stream.reserve(tokens);
  int g = 0;
  for (std::size_t i = 0; i < tokens; ++i) {
    if (u(rng) < 0.2) g = 1 - g;
    if (plant && u(rng) < 0.05) {
      stream.push_back(g == 0 ? "syn_a" : "syn_b");
    } else {
      stream.push_back(fmt("g%d_%02d", g, pick(rng)));
    }
  }
  TwoGroupCorpus c;
  c.vocab = ep::build_vocab(stream, 1000, ep::OovPolicy::kDrop);
  c.ids = ep::map_tokens(stream, c.vocab);
  c.group.resize(c.vocab.size());
  for (std::size_t id = 0; id < c.vocab.size(); ++id) {
    const auto& w = c.vocab.word(static_cast<ep::WordId>(id));
    c.group[id] = w[0] == 'g' ? w[1] - '0' : -1;
  }
  return c;
}

double within_beats_cross(const ep::DenseMatrix& v, const std::vector<int>& group,
                          double* mean_within, double* mean_cross) {
  std::vector<double> within, cross;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < v.rows(); ++j) {
      if (group[i] < 0 || group[j] < 0) continue;
      const double c = ep::cosine(v.row(i).transpose(), v.row(j).transpose());
      (group[i] == group[j] ? within : cross).push_back(c);
    }
  }
  std::sort(cross.begin(), cross.end());
  std::size_t wins = 0;
  for (const double w : within) {
    wins += static_cast<std::size_t>(std::lower_bound(cross.begin(), cross.end(), w) - cross.begin());
  }
  *mean_within = std::accumulate(within.begin(), within.end(), 0.0) / within.size();
  *mean_cross = std::accumulate(cross.begin(), cross.end(), 0.0) / cross.size();
  return static_cast<double>(wins) / (static_cast<double>(within.size()) * cross.size());
}

Outcome semantic_smoke() {
  const auto corpus = make_two_group_corpus(kSeed, 100000, false);
  ep::AccumulateOptions ao;
  ao.window = 2;
  ep::CorpusAccumulator acc(corpus.vocab, nullptr, ao);
  acc.add_ids(corpus.ids);
  const auto stats = acc.finish();

  ep::EmbedOptions eo;
  eo.dim = 10;
  eo.svd.seed = kSeed;
  double mw = 0, mc = 0, mw2 = 0, mc2 = 0;
  const double frac = within_beats_cross(ep::embed(stats, corpus.vocab, eo).words.vectors,
                                         corpus.group, &mw, &mc);
  eo.dim = 2;
  const double frac2 = within_beats_cross(ep::embed(stats, corpus.vocab, eo).words.vectors,
                                          corpus.group, &mw2, &mc2);

  // Prior injection on a corpus with two planted words that never share a
  // group, linked in the graph.
  const auto planted = make_two_group_corpus(kSeed + 1, 100000, true);
  ep::WordId a = 0, b = 0;
  planted.vocab.lookup("syn_a", a);
  planted.vocab.lookup("syn_b", b);
  const std::pair<ep::WordId, ep::WordId> edge{a, b};
  const auto graph = ep::PriorGraph::from_edges(planted.vocab.size(), std::span(&edge, 1));
  ep::CorpusAccumulator pacc(planted.vocab, &graph, ao);
  pacc.add_ids(planted.ids);
  const auto pstats = pacc.finish();
  eo.dim = 10;
  auto syn_cos = [&](double alpha) {
    eo.alpha = alpha;
    const auto v = ep::embed(pstats, planted.vocab, eo).words.vectors;
    return ep::cosine(v.row(a).transpose(), v.row(b).transpose());
  };
  const double c0 = syn_cos(0.0), c5 = syn_cos(0.5);

  Outcome o;
  o.passed = frac >= kWithinFraction && c5 > c0;
  o.detail = fmt("m=10 within>cross=%.4f (need %.2f, mean within %.3f cross %.3f; m=2 gives %.4f) "
                 "synonym cos alpha=0 %.4f alpha=0.5 %.4f",
                 frac, kWithinFraction, mw, mc, frac2, c0, c5);
  return o;
}

// ---- evaluation examples ----------------------------------------------------

Outcome eval_examples() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> broken;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) broken.push_back(what);
  };

  ep::DenseVector x(2), y(2), z(2), zero = ep::DenseVector::Zero(2);
  x << 1, 0;
  y << 0, 1;
  z << -3, 0;
  expect(ep::cosine(x, x) == 1.0 && ep::cosine(x, y) == 0.0 && ep::cosine(x, z) == -1.0,
         "cosine examples");
  expect(ep::cosine(x, zero) == 0.0, "cosine of zero vector");

  const std::vector<double> r1{1, 2, 3, 4}, r2{10, 20, 30, 40}, r3{4, 3, 2, 1};
  expect(std::abs(ep::spearman(r1, r2) - 1.0) < 1e-15, "spearman +1");
  expect(std::abs(ep::spearman(r1, r3) + 1.0) < 1e-15, "spearman -1");

  const std::vector<double> t1{1, 2, 2, 4}, t2{1, 3, 2, 4};
  expect(ep::average_ranks(t1) == oracle::ranks_by_definition(t1), "tied ranks");
  expect(std::abs(ep::spearman(t1, t2) - oracle::spearman_by_definition(t1, t2)) < 1e-14,
         "tied spearman");
  std::mt19937 rng(kSeed);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(15), b(15);
    for (auto& v : a) v = static_cast<double>(rng() % 4);
    for (auto& v : b) v = static_cast<double>(rng() % 6);
    try {
      const double got = ep::spearman(a, b);
      expect(std::abs(got - oracle::spearman_by_definition(a, b)) < 1e-12, "random ties");
    } catch (const ep::InputError&) {
      const auto ra = oracle::ranks_by_definition(a), rb = oracle::ranks_by_definition(b);
      const bool constant = std::adjacent_find(ra.begin(), ra.end(), std::not_equal_to<>()) ==
                                ra.end() ||
                            std::adjacent_find(rb.begin(), rb.end(), std::not_equal_to<>()) ==
                                rb.end();
      expect(constant, "spurious undefined correlation");
    }
  }
  bool threw = false;
  try {
    ep::spearman(std::vector<double>{5, 5, 5}, std::vector<double>{1, 2, 3});
  } catch (const ep::InputError&) {
    threw = true;
  }
  expect(threw, "constant input undefined");

  ep::EmbeddingSet emb;
  emb.words = ep::WordIndex(std::vector<std::string>{"a", "b", "c", "d", "e"});
  emb.vectors = ep::DenseMatrix::Identity(5, 5);
  emb.vectors.row(3) = emb.vectors.row(1) - emb.vectors.row(0) + emb.vectors.row(2);
  expect(ep::solve_analogy(emb, "a", "b", "c") == "d", "planted analogy");
  ep::AnalogyOptions keep;
  keep.exclude_query_words = false;
  expect(ep::solve_analogy(emb, "a", "b", "a", keep) == "b", "a:b::a:? gives b");
  expect(ep::solve_analogy(emb, "a", "b", "zz") == std::nullopt, "OOV analogy");

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome o;
  o.passed = broken.empty() && secs < kLimitEval;
  o.detail = fmt("time=%.3fs limit=%.0fs", secs, kLimitEval);
  for (const auto& b : broken) o.detail += " broken: " + b;
  return o;
}

void guarded(int id, const std::string& name, const std::function<Outcome()>& body) {
  try {
    report(id, name, body());
  } catch (const std::exception& e) {
    report(id, name, {false, std::string("exception: ") + e.what()});
  }
}

}  // namespace

int main() {
  std::printf("seed=%llu\n", static_cast<unsigned long long>(kSeed));
  guarded(1, "uniform-laplacian-identity", [] {
    return from_check(ep::verify_uniform_laplacian(kSeed, 100), kTolUniformLaplacian, kLimitUniformLaplacian);
  });
  guarded(2, "distance-identity", [] {
    return from_check(ep::verify_distance_identity(kSeed, 100), kTolDistanceIdentity, kLimitDistanceIdentity);
  });
  guarded(3, "dominance", [] {
    return from_check(ep::verify_dominance(kSeed, 20, 1000), kTolDominance, kLimitDominance);
  });
  guarded(4, "accumulation-oracle", [] {
    return from_check(ep::verify_accumulation(kSeed, 50), 0.0, kLimitAccumulation);
  });
  guarded(5, "svd-oracle", [] {
    return from_check(ep::verify_svd(kSeed, 20), kTolSvd, kLimitSvd);
  });
  guarded(6, "empty-graph-reduction", reduction_check);
  guarded(7, "semantic-smoke", semantic_smoke);
  guarded(9, "eval-examples", eval_examples);
  return failures == 0 ? 0 : 1;
}
