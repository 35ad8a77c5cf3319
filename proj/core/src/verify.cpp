#include "eigenprior/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "eigenprior/accumulate.hpp"
#include "eigenprior/cca.hpp"
#include "eigenprior/errors.hpp"
#include "eigenprior/oracle.hpp"

namespace eigenprior {

namespace {

using Clock = std::chrono::steady_clock;

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t check) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(check)};
  return std::mt19937_64(seq);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

DenseMatrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = u(rng);
  }
  return m;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void record(CheckResult& res, double err, const std::string& what) {
  if (err > res.worst || std::isnan(err)) res.worst = err;
  if (!(err <= res.tolerance) && res.passed) {
    res.passed = false;
    res.detail = what;
  }
}

CheckResult make_result(std::string name, std::size_t instances, double tolerance) {
  CheckResult res;
  res.name = std::move(name);
  res.instances = instances;
  res.tolerance = tolerance;
  return res;
}

// For checks whose bound differs from the result's headline tolerance.
void fail(CheckResult& res, double err, const std::string& what) {
  res.worst = std::max(res.worst, err);
  if (res.passed) {
    res.passed = false;
    res.detail = what;
  }
}

}  // namespace

DenseMatrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  EIGENPRIOR_REQUIRE(cols <= rows, "cannot have more orthonormal columns than rows");
  if (cols == 0) return DenseMatrix(rows, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = normal(rng);
  }
  return orthonormalize(g);
}

CheckResult verify_uniform_laplacian(std::uint64_t seed, std::size_t instances) {
  CheckResult res = make_result("uniform-laplacian: X^T L Y = n X^T Y (uniform L, centered)", instances, 1e-9);
  const auto start = Clock::now();
  auto rng = stream_for(seed, 1);
  for (std::size_t t = 0; t < instances; ++t) {
    const int n = uniform_int(rng, 2, 20);
    const DenseMatrix x = uniform_matrix(n, uniform_int(rng, 1, 8), rng);
    const DenseMatrix y = uniform_matrix(n, uniform_int(rng, 1, 8), rng);
    const DenseMatrix cross = center_columns(x).transpose() * center_columns(y);
    const double scale = n * std::max(1.0, cross.cwiseAbs().maxCoeff());
    record(res, check_uniform_laplacian(x, y) / scale,
           "uniform Laplacian identity violated at instance " + std::to_string(t));
  }
  res.seconds = seconds_since(start);
  return res;
}

CheckResult verify_distance_identity(std::uint64_t seed, std::size_t instances, bool perturb) {
  CheckResult res = make_result("distance-identity: sum (Xu)^T L (Yv) = sum -L_ij d_ij^2", instances, 1e-9);
  if (perturb) res.name += " [perturbed L]";
  const auto start = Clock::now();
  auto rng = stream_for(seed, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < instances; ++t) {
    const int n = uniform_int(rng, 2, 10);
    const int d = uniform_int(rng, 1, 6);
    const int dp = uniform_int(rng, 1, 6);
    const int m = uniform_int(rng, 0, std::min({4, d, dp}));
    const double density = unit(rng);
    DenseMatrix weights = DenseMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (unit(rng) < density) weights(i, j) = weights(j, i) = 0.1 + unit(rng);
      }
    }
    const DenseMatrix x = uniform_matrix(n, d, rng);
    const DenseMatrix y = uniform_matrix(n, dp, rng);
    const DenseMatrix u = random_orthonormal(d, m, rng);
    const DenseMatrix v = random_orthonormal(dp, m, rng);
    const LaplacianSpec lap = LaplacianSpec::from_weights(weights);
    IdentitySides sides;
    if (perturb) {
      DenseMatrix bumped = lap.matrix();
      bumped(0, n - 1) += 0.5;
      sides = projection_distance_sides(x, y, bumped, u, v);
    } else {
      sides = check_distance_identity(x, y, lap, u, v);
    }
    record(res, std::abs(sides.lhs - sides.rhs) / (1.0 + std::abs(sides.lhs)),
           "distance identity violated at instance " + std::to_string(t) +
               (perturb ? " (L not a Laplacian: asymmetric, nonzero row sums)" : ""));
  }
  res.seconds = seconds_since(start);
  return res;
}

CheckResult verify_dominance(std::uint64_t seed, std::size_t instances, std::size_t candidates) {
  CheckResult res = make_result("dominance: reference CCA dominates random projections", instances, 1e-8);
  const auto start = Clock::now();
  auto rng = stream_for(seed, 2);
  for (std::size_t t = 0; t < instances; ++t) {
    const int d = uniform_int(rng, 1, 6);
    const int dp = uniform_int(rng, 1, 6);
    const int m = uniform_int(rng, 1, std::min({3, d, dp}));
    const int n = uniform_int(rng, 2, 15);
    const DenseMatrix x = center_columns(uniform_matrix(n, d, rng));
    const DenseMatrix y = center_columns(uniform_matrix(n, dp, rng));
    const DenseMatrix cross = x.transpose() * y;

    const SvdFactors ref =
        laplacian_cca_reference(x, y, LaplacianSpec::uniform(n), m, CcaMode::kMaximize);
    const double best = distance_objective(x, y, ref.U, ref.V);
    const SvdFactors plain = dense_svd(cross);
    const double sigma_sum = plain.S.head(m).sum();
    const double expected = n * sigma_sum;

    const std::string tag = " at instance " + std::to_string(t);
    record(res, std::abs(best - expected) / std::max(1.0, std::abs(expected)),
           "distance objective != n * sum of top-m singular values" + tag);

    // Lemma 2 on X^T Y and the distance objective, both against candidates.
    const double slack = 1e-9 * std::max(1.0, std::abs(best));
    for (std::size_t c = 0; c < candidates; ++c) {
      const DenseMatrix u = random_orthonormal(d, m, rng);
      const DenseMatrix v = random_orthonormal(dp, m, rng);
      const double trace = (u.transpose() * cross * v).trace();
      const double excess2 = trace - sigma_sum;
      if (excess2 > 1e-9 * std::max(1.0, sigma_sum)) {
        fail(res, excess2, "cross-product bound exceeded by a random candidate" + tag);
      }
      const double excess = distance_objective(x, y, u, v) - best;
      if (excess > slack) {
        fail(res, excess, "reference projections beaten by a random candidate" + tag);
      }
    }
  }
  res.seconds = seconds_since(start);
  return res;
}

CheckResult verify_accumulation(std::uint64_t seed, std::size_t instances) {
  CheckResult res = make_result("accumulation: pipeline == brute-force oracle (exact)", instances, 0.0);
  const auto start = Clock::now();
  auto rng = stream_for(seed, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < instances; ++t) {
    const int distinct = uniform_int(rng, 2, 34);
    const int length = uniform_int(rng, 1, 500);
    std::vector<std::string> tokens;
    std::ostringstream text;
    for (int i = 0; i < length; ++i) {
      // Skewed draw so the vocabulary cap actually cuts words off.
      const int w = static_cast<int>(distinct * unit(rng) * unit(rng));
      tokens.push_back("w" + std::to_string(w));
      text << tokens.back() << (uniform_int(rng, 0, 9) == 0 ? '\n' : ' ');
    }
    const OovPolicy policy = uniform_int(rng, 0, 1) ? OovPolicy::kMapToUnknown : OovPolicy::kDrop;
    const Vocabulary vocab =
        build_vocab(tokens, static_cast<std::size_t>(uniform_int(rng, 1, 29)), policy);

    const double density = 0.3 * unit(rng);
    std::vector<std::pair<WordId, WordId>> edges;
    for (WordId i = 0; i < vocab.size(); ++i) {
      for (WordId j = i + 1; j < vocab.size(); ++j) {
        if (unit(rng) < density) edges.emplace_back(i, j);
      }
    }
    const PriorGraph graph = PriorGraph::from_edges(vocab.size(), edges);

    AccumulateOptions opts;
    opts.window = static_cast<std::size_t>(uniform_int(rng, 1, 2));
    const std::size_t ns[] = {0, 3, 12};
    opts.window_n = ns[uniform_int(rng, 0, 2)];
    opts.chunk_len = uniform_int(rng, 0, 1) ? 5 : 13;
    opts.threads = static_cast<unsigned>(uniform_int(rng, 1, 4));
    opts.batch_chunks = static_cast<std::size_t>(uniform_int(rng, 1, 8));

    CorpusAccumulator acc(vocab, &graph, opts);
    std::istringstream in(text.str());
    acc.add_text(in);
    const CooccurrenceStats got = acc.finish();
    const CooccurrenceStats want =
        oracle_accumulate(tokens, vocab, opts.window, opts.window_n, graph, opts.chunk_len);
    if (!(got == want)) {
      fail(res, 1.0,
           "stats differ from oracle at instance " + std::to_string(t) +
                 " (k=" + std::to_string(opts.window) + " N=" + std::to_string(opts.window_n) +
                 " T=" + std::to_string(opts.chunk_len) + ")");
    }
  }
  res.seconds = seconds_since(start);
  return res;
}

CheckResult verify_svd(std::uint64_t seed, std::size_t instances) {
  CheckResult res = make_result("svd: truncated singular values vs dense oracle", instances, 1e-6);
  const auto start = Clock::now();
  auto rng = stream_for(seed, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (std::size_t t = 0; t < instances; ++t) {
    std::vector<Triplet> triplets;
    for (std::size_t r = 0; r < 200; ++r) {
      for (std::size_t c = 0; c < 300; ++c) {
        if (unit(rng) < 0.05) triplets.push_back({r, c, value(rng)});
      }
    }
    const SparseMatrix a = SparseMatrix::from_triplets(200, 300, std::move(triplets));
    TruncatedSvdOptions opts;
    opts.rank = 10;
    opts.oversample = 10;
    opts.power_iters = 3;
    opts.seed = rng();
    const SvdFactors got = truncated_svd(a, opts);
    const SvdFactors want = dense_svd(a.to_dense());
    for (Eigen::Index j = 0; j < opts.rank; ++j) {
      record(res, std::abs(got.S[j] - want.S[j]) / want.S[j],
             "singular value " + std::to_string(j + 1) + " off at instance " +
                 std::to_string(t));
    }
  }
  res.seconds = seconds_since(start);
  return res;
}

std::vector<CheckResult> run_all(const VerifyOptions& o) {
  return {
      verify_uniform_laplacian(o.seed, o.uniform_laplacian),
      verify_distance_identity(o.seed, o.distance_identity, o.perturb_laplacian),
      verify_dominance(o.seed, o.dominance, o.candidates),
      verify_accumulation(o.seed, o.accumulation),
      verify_svd(o.seed, o.svd),
  };
}

}  // namespace eigenprior
