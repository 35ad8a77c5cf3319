// eigenprior: corpus -> vocabulary -> co-occurrence stats -> embeddings,
// plus evaluation and the identity checks. Exit codes: 0 ok, 1 usage,
// 2 bad input data, 3 verification failure.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eigenprior/accumulate.hpp"
#include "eigenprior/cca.hpp"
#include "eigenprior/corpus.hpp"
#include "eigenprior/errors.hpp"
#include "eigenprior/eval.hpp"
#include "eigenprior/prior_graph.hpp"
#include "eigenprior/stats_io.hpp"
#include "eigenprior/verify.hpp"

namespace ep = eigenprior;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string expand_alpha(const std::string& pattern, double alpha) {
  std::string out = pattern;
  const std::string key = "{alpha}";
  for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos)) {
    out.replace(pos, key.size(), shortest(alpha));
  }
  return out;
}

struct SvdFlags {
  std::uint64_t seed = 1;
  Eigen::Index oversample = 10;
  int power_iters = 3;
  double tolerance = 1e-10;
  int max_iters = 200;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed for the randomized SVD")->capture_default_str();
    cmd->add_option("--oversample", oversample, "Extra columns in the sketch")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--power-iters", power_iters, "Minimum subspace iterations")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--tol", tolerance, "Stop when Ritz values move less than this (0 = off)")
        ->capture_default_str();
    cmd->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();
  }

  ep::TruncatedSvdOptions options(Eigen::Index rank, unsigned threads) const {
    ep::TruncatedSvdOptions o;
    o.rank = rank;
    o.oversample = oversample;
    o.power_iters = power_iters;
    o.tolerance = tolerance;
    o.max_iters = std::max(max_iters, power_iters);
    o.seed = seed;
    o.threads = threads;
    return o;
  }
};

// ---- build-vocab ---------------------------------------------------------

struct BuildVocabArgs {
  std::vector<std::string> corpus;
  std::size_t max_size = 200000;
  std::string oov = "unk";
  std::string out;
};

void run_build_vocab(const BuildVocabArgs& a) {
  ep::TokenCounts counts;
  for (const auto& path : a.corpus) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ep::InputError("cannot open corpus: " + path);
    ep::for_each_token(in, [&](std::string_view tok) { ++counts[std::string(tok)]; });
  }
  const auto vocab = ep::build_vocab(counts, a.max_size, ep::parse_oov_policy(a.oov));
  ep::save_vocab(a.out, vocab);
  std::cerr << "vocab: " << vocab.size() << " words (" << counts.size() << " distinct) -> "
            << a.out << "\n";
}

// ---- accumulate ----------------------------------------------------------

struct AccumulateArgs {
  std::vector<std::string> corpus;
  std::string vocab;
  std::string graph;
  std::string lemma_map;
  ep::AccumulateOptions opts;
  std::string out;
};

struct LoadedGraph {
  ep::PriorGraph graph;
  std::string fingerprint;
};

LoadedGraph load_graph(const std::string& path, const std::string& lemma_path,
                       const ep::Vocabulary& vocab) {
  std::optional<ep::LemmaMap> lemmas;
  if (!lemma_path.empty()) lemmas = ep::load_lemma_map(lemma_path);
  auto report = ep::load_edges(path, vocab, lemmas ? &*lemmas : nullptr);
  std::cerr << "graph: " << report.graph.edge_count() << " edges from " << report.lines
            << " lines, " << report.unresolved_lines << " unresolved\n";
  std::string fp = ep::file_fingerprint(path);
  if (!lemma_path.empty()) fp += "+" + ep::file_fingerprint(lemma_path);
  return {std::move(report.graph), fp};
}

void run_accumulate(const AccumulateArgs& a) {
  if (2 * a.opts.window + 1 > a.opts.chunk_len) {
    throw UsageError("--chunk-len must be at least 2*--window+1");
  }
  const auto vocab = ep::load_vocab(a.vocab);
  std::optional<LoadedGraph> graph;
  if (!a.graph.empty()) graph = load_graph(a.graph, a.lemma_map, vocab);

  ep::StatsMeta meta;
  meta.window_n = a.opts.window_n;
  meta.chunk_len = a.opts.chunk_len;
  meta.oov = vocab.has_unknown() ? "unk" : "drop";
  if (graph) meta.graph_fnv1a64 = graph->fingerprint;

  ep::CorpusAccumulator acc(vocab, graph ? &graph->graph : nullptr, a.opts);
  for (const auto& path : a.corpus) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ep::InputError("cannot open corpus: " + path);
    acc.add_text(in);
    meta.corpus.push_back({std::filesystem::path(path).filename().string(),
                           ep::file_fingerprint(path)});
  }
  const auto stats = acc.finish();
  ep::save_stats(a.out, stats);
  ep::save_stats_meta(ep::stats_meta_path(a.out), meta);
  std::cerr << "stats: " << acc.tokens_seen() << " tokens, " << acc.tokens_dropped()
            << " dropped, " << acc.chunks_seen() << " chunks, " << stats.example_count()
            << " examples, " << stats.nonzero_count() << " cells -> " << a.out << "\n";
}

// ---- merge ---------------------------------------------------------------

struct MergeArgs {
  std::vector<std::string> inputs;
  std::string out;
};

void run_merge(const MergeArgs& a) {
  ep::CooccurrenceStats total = ep::load_stats(a.inputs.front());
  ep::StatsMeta meta = ep::load_stats_meta(ep::stats_meta_path(a.inputs.front()));
  for (std::size_t i = 1; i < a.inputs.size(); ++i) {
    const auto stats = ep::load_stats(a.inputs[i]);
    const auto m = ep::load_stats_meta(ep::stats_meta_path(a.inputs[i]));
    if (stats.vocab_size() != total.vocab_size() || stats.window() != total.window()) {
      throw ep::InputError(a.inputs[i] + ": |H| or k differs from " + a.inputs.front());
    }
    if (m.window_n != meta.window_n || m.chunk_len != meta.chunk_len || m.oov != meta.oov ||
        m.graph_fnv1a64 != meta.graph_fnv1a64) {
      throw ep::InputError(a.inputs[i] + ": N, T, OOV policy or graph differs from " +
                           a.inputs.front());
    }
    total.merge(stats);
    meta.corpus.insert(meta.corpus.end(), m.corpus.begin(), m.corpus.end());
  }
  ep::save_stats(a.out, total);
  ep::save_stats_meta(ep::stats_meta_path(a.out), meta);
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string stats;
  std::string vocab;
  std::vector<double> alphas;
  bool sweep = false;
  Eigen::Index dim = 300;
  bool sqrt_transform = true;
  bool no_d1_projection = false;
  std::string out;
  std::string context_out;
  unsigned threads = 1;
  SvdFlags svd;
};

void run_train(TrainArgs a) {
  if (a.sweep) a.alphas.insert(a.alphas.end(), ep::kDefaultAlphaGrid.begin(),
                               ep::kDefaultAlphaGrid.end());
  if (a.alphas.empty()) a.alphas.push_back(0.0);
  if (a.alphas.size() > 1 && a.out.find("{alpha}") == std::string::npos) {
    throw UsageError("--out must contain {alpha} when training several alpha values");
  }
  if (a.alphas.size() > 1 && !a.context_out.empty() &&
      a.context_out.find("{alpha}") == std::string::npos) {
    throw UsageError("--context-out must contain {alpha} when training several alpha values");
  }

  const auto vocab = ep::load_vocab(a.vocab);
  const auto stats = ep::load_stats(a.stats);
  if (stats.vocab_size() != vocab.size()) {
    throw ep::InputError("stats |H|=" + std::to_string(stats.vocab_size()) +
                         " but vocabulary has " + std::to_string(vocab.size()) + " words");
  }
  if (static_cast<std::size_t>(a.dim) > vocab.size()) {
    throw UsageError("--dim " + std::to_string(a.dim) + " exceeds |H|=" +
                     std::to_string(vocab.size()));
  }
  if (static_cast<std::uint64_t>(a.dim) > stats.context_dim()) {
    throw UsageError("--dim exceeds the context dimension 2k|H|");
  }

  std::string fingerprint;
  std::size_t window_n = 0;
  const auto meta_path = ep::stats_meta_path(a.stats);
  if (std::filesystem::exists(meta_path)) {
    const auto meta = ep::load_stats_meta(meta_path);
    fingerprint = meta.fingerprint();
    window_n = meta.window_n;
  } else {
    fingerprint = ep::file_fingerprint(a.stats);
  }

  for (const double alpha : a.alphas) {
    ep::EmbedOptions opts;
    opts.dim = a.dim;
    opts.alpha = alpha;
    opts.sqrt_transform = a.sqrt_transform;
    opts.d1_projection = !a.no_d1_projection;
    opts.context = !a.context_out.empty();
    opts.svd = a.svd.options(a.dim, a.threads);
    auto result = ep::embed(stats, vocab, opts);
    for (auto* set : {&result.words, result.contexts ? &*result.contexts : nullptr}) {
      if (set == nullptr) continue;
      set->meta.window_n = window_n;
      set->meta.corpus_fingerprint = fingerprint;
    }
    if (result.zero_count_words > 0) {
      std::cerr << "warning: " << result.zero_count_words
                << " words never occur as pivots; their vectors are zero\n";
    }
    if (!result.svd_report.converged) {
      std::cerr << "warning: SVD stopped after " << result.svd_report.iterations
                << " iterations without reaching --tol (last change "
                << result.svd_report.last_change << ")\n";
    }
    const auto path = expand_alpha(a.out, alpha);
    ep::save_word2vec(path, result.words);
    ep::save_embedding_meta(ep::embedding_meta_path(path), result.words.meta);
    if (result.contexts) {
      const auto cpath = expand_alpha(a.context_out, alpha);
      ep::save_word2vec(cpath, *result.contexts);
      ep::save_embedding_meta(ep::embedding_meta_path(cpath), result.contexts->meta);
    }
    std::cout << "alpha=" << shortest(alpha) << " dim=" << a.dim
              << " sigma1=" << (result.singular_values.size() ? result.singular_values[0] : 0.0)
              << " iterations=" << result.svd_report.iterations << " out=" << path << "\n";
  }
}

// ---- evaluation ----------------------------------------------------------

struct EvalArgs {
  std::string embeddings;
  std::vector<std::string> datasets;
  unsigned threads = 1;
};

void run_eval_sim(const EvalArgs& a) {
  const auto emb = ep::load_word2vec(a.embeddings);
  double sum = 0.0;
  for (const auto& path : a.datasets) {
    const auto r = ep::eval_similarity(emb, ep::load_similarity_dataset(path));
    std::printf("dataset=%s rho=%.6f covered=%zu total=%zu\n",
                std::filesystem::path(path).filename().string().c_str(), r.rho, r.covered,
                r.total);
    sum += r.rho;
  }
  if (a.datasets.size() > 1) {
    std::printf("mean_rho=%.6f datasets=%zu\n", sum / static_cast<double>(a.datasets.size()),
                a.datasets.size());
  }
}

void run_eval_analogy(const EvalArgs& a) {
  const auto emb = ep::load_word2vec(a.embeddings);
  ep::AnalogyOptions opts;
  opts.threads = a.threads;
  for (const auto& path : a.datasets) {
    const auto ds = ep::load_analogy_dataset(path);
    const auto r = ep::eval_analogy(emb, ds, opts);
    std::printf("dataset=%s accuracy=%.6f correct=%zu covered=%zu total=%zu sections=%zu\n",
                std::filesystem::path(path).filename().string().c_str(), r.accuracy, r.correct,
                r.covered, r.total, ds.sections);
  }
}

struct GraphEmbedArgs {
  std::string vocab;
  std::string graph;
  std::string lemma_map;
  Eigen::Index dim = 300;
  unsigned threads = 1;
  std::string out;
  SvdFlags svd;
};

void run_graph_embed(const GraphEmbedArgs& a) {
  const auto vocab = ep::load_vocab(a.vocab);
  if (static_cast<std::size_t>(a.dim) > vocab.size()) {
    throw UsageError("--dim " + std::to_string(a.dim) + " exceeds |H|=" +
                     std::to_string(vocab.size()));
  }
  const auto g = load_graph(a.graph, a.lemma_map, vocab);
  auto emb = ep::graph_only_embed(g.graph, vocab, a.dim, a.svd.options(a.dim, a.threads));
  emb.meta.corpus_fingerprint = g.fingerprint;
  ep::save_word2vec(a.out, emb);
  ep::save_embedding_meta(ep::embedding_meta_path(a.out), emb.meta);
}

// ---- verify --------------------------------------------------------------

int run_verify(const ep::VerifyOptions& o) {
  std::printf("seed=%llu\n", static_cast<unsigned long long>(o.seed));
  bool ok = true;
  for (const auto& r : ep::run_all(o)) {
    std::printf("%s  %s  instances=%zu worst=%.3g tol=%.3g time=%.3fs\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.instances, r.worst, r.tolerance, r.seconds);
    if (!r.passed) std::printf("      violated: %s\n", r.detail.c_str());
    ok = ok && r.passed;
  }
  std::fflush(stdout);
  return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CCA word embeddings with graph priors"};
  app.set_config("--config", "", "key=value file (use [subcommand] sections); flags win");
  app.require_subcommand(1);

  BuildVocabArgs bv;
  auto* cmd_vocab = app.add_subcommand("build-vocab", "Count tokens and write vocab.tsv");
  cmd_vocab->add_option("--corpus", bv.corpus, "Corpus text files")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_vocab->add_option("--max-size", bv.max_size, "Keep this many most frequent words")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_vocab->add_option("--oov", bv.oov, "Out-of-vocabulary policy")
      ->check(CLI::IsMember({"unk", "drop"}))
      ->capture_default_str();
  cmd_vocab->add_option("--out", bv.out, "Vocabulary file")->required();

  AccumulateArgs ac;
  auto* cmd_acc = app.add_subcommand("accumulate", "Scan corpus files into a stats file");
  cmd_acc->add_option("--corpus", ac.corpus, "Corpus files; each is chunked on its own")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_acc->add_option("--vocab", ac.vocab)->required()->check(CLI::ExistingFile);
  cmd_acc->add_option("--graph", ac.graph, "Edge list word1<TAB>word2")
      ->check(CLI::ExistingFile);
  cmd_acc->add_option("--lemma-map", ac.lemma_map, "surface<TAB>base file")
      ->check(CLI::ExistingFile);
  cmd_acc->add_option("-k,--window", ac.opts.window, "Context words on each side")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_acc->add_option("-N,--window-n", ac.opts.window_n, "Max distance between prior pairs")
      ->capture_default_str();
  cmd_acc->add_option("-T,--chunk-len", ac.opts.chunk_len, "Document chunk length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_acc->add_option("--threads", ac.opts.threads)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_acc->add_option("--out", ac.out, "Stats file")->required();

  MergeArgs mg;
  auto* cmd_merge = app.add_subcommand("merge", "Sum stats files produced by accumulate");
  cmd_merge->add_option("inputs", mg.inputs)->required()->check(CLI::ExistingFile);
  cmd_merge->add_option("--out", mg.out)->required();

  TrainArgs tr;
  auto* cmd_train = app.add_subcommand("train", "Factor a stats file into embeddings");
  cmd_train->add_option("--stats", tr.stats)->required()->check(CLI::ExistingFile);
  cmd_train->add_option("--vocab", tr.vocab)->required()->check(CLI::ExistingFile);
  cmd_train->add_option("--alpha", tr.alphas, "Prior weight(s) in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  cmd_train->add_flag("--alpha-sweep", tr.sweep, "Also train 0.1, 0.2, 0.5, 0.7, 0.9");
  cmd_train->add_option("-m,--dim", tr.dim)->check(CLI::PositiveNumber)->capture_default_str();
  cmd_train->add_flag("--sqrt,!--no-sqrt", tr.sqrt_transform, "Square-root transform counts")
      ->capture_default_str();
  cmd_train->add_flag("--no-d1-projection", tr.no_d1_projection,
                      "Write raw rows of U instead of D1^{-1/2} U");
  cmd_train->add_option("--out", tr.out, "Embedding file; {alpha} is substituted")->required();
  cmd_train->add_option("--context-out", tr.context_out, "Also write context-slot vectors");
  cmd_train->add_option("--threads", tr.threads)->check(CLI::PositiveNumber)
      ->capture_default_str();
  tr.svd.attach(cmd_train);

  EvalArgs es;
  auto* cmd_sim = app.add_subcommand("eval-sim", "Spearman rho on word-similarity datasets");
  cmd_sim->add_option("--embeddings", es.embeddings)->required()->check(CLI::ExistingFile);
  cmd_sim->add_option("--dataset", es.datasets)->required()->check(CLI::ExistingFile);

  EvalArgs ea;
  auto* cmd_ana = app.add_subcommand("eval-analogy", "Vector-offset analogy accuracy");
  cmd_ana->add_option("--embeddings", ea.embeddings)->required()->check(CLI::ExistingFile);
  cmd_ana->add_option("--dataset", ea.datasets)->required()->check(CLI::ExistingFile);
  cmd_ana->add_option("--threads", ea.threads)->check(CLI::PositiveNumber)->capture_default_str();

  GraphEmbedArgs ge;
  auto* cmd_graph = app.add_subcommand("graph-embed", "Embeddings from the prior graph alone");
  cmd_graph->add_option("--vocab", ge.vocab)->required()->check(CLI::ExistingFile);
  cmd_graph->add_option("--graph", ge.graph)->required()->check(CLI::ExistingFile);
  cmd_graph->add_option("--lemma-map", ge.lemma_map)->check(CLI::ExistingFile);
  cmd_graph->add_option("-m,--dim", ge.dim)->check(CLI::PositiveNumber)->capture_default_str();
  cmd_graph->add_option("--threads", ge.threads)->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd_graph->add_option("--out", ge.out)->required();
  ge.svd.attach(cmd_graph);

  ep::VerifyOptions vo;
  auto* cmd_verify = app.add_subcommand("verify", "Randomized checks of the CCA identities");
  cmd_verify->add_option("--seed", vo.seed)->capture_default_str();
  cmd_verify->add_option("--uniform-laplacian", vo.uniform_laplacian, "Instances")
      ->capture_default_str();
  cmd_verify->add_option("--distance-identity", vo.distance_identity, "Instances")
      ->capture_default_str();
  cmd_verify->add_option("--dominance", vo.dominance, "Instances")->capture_default_str();
  cmd_verify->add_option("--candidates", vo.candidates, "Random projections per instance")
      ->capture_default_str();
  cmd_verify->add_option("--accumulation", vo.accumulation, "Instances")->capture_default_str();
  cmd_verify->add_option("--svd", vo.svd, "Instances")->capture_default_str();
  cmd_verify->add_flag("--perturb-laplacian", vo.perturb_laplacian,
                       "Break L's symmetry to see the distance identity fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cmd_vocab) run_build_vocab(bv);
    if (*cmd_acc) run_accumulate(ac);
    if (*cmd_merge) run_merge(mg);
    if (*cmd_train) run_train(tr);
    if (*cmd_sim) run_eval_sim(es);
    if (*cmd_ana) run_eval_analogy(ea);
    if (*cmd_graph) run_graph_embed(ge);
    if (*cmd_verify) return run_verify(vo);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ep::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ep::ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
