#include "eigenprior/cca.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "eigenprior/errors.hpp"

namespace eigenprior {

namespace {

double transform(double x, bool sqrt_transform) { return sqrt_transform ? std::sqrt(x) : x; }

// 1 / sqrt(g(count)), or 0 for an empty row/column.
double inverse_root(std::uint64_t count, bool sqrt_transform) {
  if (count == 0) return 0.0;
  return 1.0 / std::sqrt(transform(static_cast<double>(count), sqrt_transform));
}

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

SparseMatrix scale(const CooccurrenceStats& stats, double alpha, bool sqrt_transform) {
  EIGENPRIOR_REQUIRE(alpha >= 0.0 && alpha <= 1.0, "alpha must be in [0, 1]");
  std::vector<Triplet> triplets;
  triplets.reserve(stats.nonzero_count());
  for (const auto& e : stats.sorted_entries()) {
    const auto d1 = stats.d1()[e.row];
    const auto d2 = stats.d2()[e.slot];
    if (d1 == 0 || d2 == 0) continue;
    const double count =
        static_cast<double>(e.counts.unit) + alpha * static_cast<double>(e.counts.prior);
    const double value = transform(count, sqrt_transform) /
                         (std::sqrt(transform(static_cast<double>(d1), sqrt_transform)) *
                          std::sqrt(transform(static_cast<double>(d2), sqrt_transform)));
    if (value != 0.0) triplets.push_back({e.row, static_cast<std::size_t>(e.slot), value});
  }
  return SparseMatrix::from_triplets(stats.vocab_size(), static_cast<std::size_t>(stats.context_dim()),
                                     std::move(triplets));
}

std::string context_slot_label(const Vocabulary& vocab, std::size_t window, std::uint64_t slot) {
  const auto position = static_cast<std::size_t>(slot / vocab.size());
  const auto word = static_cast<WordId>(slot % vocab.size());
  const int offset = context_offset(position, window);
  return vocab.word(word) + "@" + (offset > 0 ? "+" : "") + std::to_string(offset);
}

EmbedResult embed(const CooccurrenceStats& stats, const Vocabulary& vocab,
                  const EmbedOptions& options) {
  EIGENPRIOR_REQUIRE(vocab.size() == stats.vocab_size(), "vocabulary and stats sizes differ");
  EIGENPRIOR_REQUIRE(options.dim >= 1 && static_cast<std::size_t>(options.dim) <= vocab.size(),
                     "embedding dimension must be in [1, |H|]");

  const SparseMatrix scaled = scale(stats, options.alpha, options.sqrt_transform);
  TruncatedSvdOptions svd_options = options.svd;
  svd_options.rank = options.dim;

  EmbedResult result;
  SvdFactors f = truncated_svd(scaled, svd_options, &result.svd_report);
  result.singular_values = f.S;

  EmbeddingMeta meta;
  meta.kind = "cca";
  meta.dim = options.dim;
  meta.alpha = options.alpha;
  meta.window = stats.window();
  meta.sqrt_transform = options.sqrt_transform;
  meta.d1_projection = options.d1_projection;
  meta.seed = options.svd.seed;
  meta.svd_iterations = result.svd_report.iterations;
  meta.svd_converged = result.svd_report.converged;

  for (std::size_t r = 0; r < vocab.size(); ++r) {
    const double w = inverse_root(stats.d1()[r], options.sqrt_transform);
    if (w == 0.0) {
      ++result.zero_count_words;
      f.U.row(static_cast<Eigen::Index>(r)).setZero();
    } else if (options.d1_projection) {
      f.U.row(static_cast<Eigen::Index>(r)) *= w;
    }
  }
  result.words = EmbeddingSet{WordIndex(vocab), std::move(f.U), meta};

  if (options.context) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(stats.context_dim()));
    for (std::uint64_t s = 0; s < stats.context_dim(); ++s) {
      labels.push_back(context_slot_label(vocab, stats.window(), s));
      const double w = inverse_root(stats.d2()[s], options.sqrt_transform);
      const auto row = static_cast<Eigen::Index>(s);
      if (w == 0.0) {
        f.V.row(row).setZero();
      } else if (options.d1_projection) {
        f.V.row(row) *= w;
      }
    }
    EmbeddingMeta context_meta = meta;
    context_meta.kind = "cca-context";
    result.contexts = EmbeddingSet{WordIndex(std::move(labels)), std::move(f.V), context_meta};
  }
  return result;
}

LaplacianSpec::LaplacianSpec(DenseMatrix matrix, Kind kind) : matrix_(std::move(matrix)), kind_(kind) {
  EIGENPRIOR_REQUIRE(matrix_.rows() == matrix_.cols(), "Laplacian must be square");
  EIGENPRIOR_REQUIRE(matrix_.allFinite(), "Laplacian must be finite");
  const double scale = std::max(1.0, max_abs(matrix_));
  EIGENPRIOR_REQUIRE(max_abs(matrix_ - matrix_.transpose()) <= 1e-12 * scale,
                     "Laplacian must be symmetric");
  if (kind_ == Kind::kStrict) {
    const double tol = 1e-12 * scale * static_cast<double>(std::max<Eigen::Index>(1, size()));
    for (Eigen::Index i = 0; i < size(); ++i) {
      EIGENPRIOR_REQUIRE(std::abs(matrix_.row(i).sum()) <= tol,
                         "strict Laplacian rows must sum to zero");
      for (Eigen::Index j = 0; j < size(); ++j) {
        EIGENPRIOR_REQUIRE(i == j || matrix_(i, j) <= 0.0,
                           "strict Laplacian off-diagonals must be <= 0");
      }
    }
  }
}

LaplacianSpec LaplacianSpec::uniform(Eigen::Index n) {
  DenseMatrix l = DenseMatrix::Constant(n, n, -1.0);
  l.diagonal().setConstant(static_cast<double>(n - 1));
  return LaplacianSpec(std::move(l), Kind::kStrict);
}

LaplacianSpec LaplacianSpec::from_weights(const DenseMatrix& weights) {
  EIGENPRIOR_REQUIRE(weights.rows() == weights.cols(), "weight matrix must be square");
  DenseMatrix a = weights;
  a.diagonal().setZero();
  EIGENPRIOR_REQUIRE((a.array() >= 0.0).all(), "graph weights must be non-negative");
  DenseMatrix l = -a;
  l.diagonal() = a.rowwise().sum();
  return LaplacianSpec(std::move(l), Kind::kStrict);
}

LaplacianSpec LaplacianSpec::relaxed_prior(const DenseMatrix& adjacency, double alpha) {
  EIGENPRIOR_REQUIRE(adjacency.rows() == adjacency.cols(), "adjacency must be square");
  DenseMatrix l(adjacency.rows(), adjacency.cols());
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    for (Eigen::Index j = 0; j < l.cols(); ++j) {
      l(i, j) = i == j ? 1.0 : (adjacency(i, j) != 0.0 ? 0.0 : alpha);
    }
  }
  return LaplacianSpec(std::move(l), Kind::kRelaxed);
}

SvdFactors laplacian_cca_reference(const DenseMatrix& x, const DenseMatrix& y,
                                   const LaplacianSpec& laplacian, Eigen::Index m, CcaMode mode) {
  EIGENPRIOR_REQUIRE(x.rows() == y.rows() && x.rows() == laplacian.size(),
                     "X, Y and L must share the example dimension n");
  EIGENPRIOR_REQUIRE(m >= 0 && m <= std::min(x.cols(), y.cols()),
                     "m must be in [0, min(d, d')]");
  const DenseMatrix cross = x.transpose() * laplacian.matrix() * y;
  if (mode == CcaMode::kMinimize) return smallest_svd(cross, m);
  SvdFactors f = dense_svd(cross);
  f.U = f.U.leftCols(m).eval();
  f.V = f.V.leftCols(m).eval();
  f.S = f.S.head(m).eval();
  return f;
}

DenseMatrix center_columns(const DenseMatrix& x) {
  if (x.rows() == 0) return x;
  return x.rowwise() - x.colwise().mean();
}

double check_uniform_laplacian(const DenseMatrix& x, const DenseMatrix& y) {
  EIGENPRIOR_REQUIRE(x.rows() == y.rows(), "X and Y must have the same number of rows");
  const DenseMatrix xc = center_columns(x);
  const DenseMatrix yc = center_columns(y);
  const auto n = x.rows();
  const LaplacianSpec l = LaplacianSpec::uniform(n);
  const DenseMatrix lhs = xc.transpose() * l.matrix() * yc;
  const DenseMatrix rhs = static_cast<double>(n) * (xc.transpose() * yc);
  return max_abs(lhs - rhs);
}

IdentitySides projection_distance_sides(const DenseMatrix& x, const DenseMatrix& y,
                                        const DenseMatrix& weights, const DenseMatrix& u,
                                        const DenseMatrix& v) {
  EIGENPRIOR_REQUIRE(x.rows() == y.rows() && weights.rows() == x.rows() &&
                         weights.cols() == x.rows(),
                     "X, Y and L must share the example dimension n");
  EIGENPRIOR_REQUIRE(u.rows() == x.cols() && v.rows() == y.cols() && u.cols() == v.cols(),
                     "projection shapes do not match X and Y");
  const DenseMatrix px = x * u;  // n x m, column k = X u_k
  const DenseMatrix py = y * v;
  IdentitySides sides;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    sides.lhs += px.col(k).dot(weights * py.col(k));
  }
  const Eigen::Index n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d2 = 0.5 * (px.row(i) - py.row(j)).squaredNorm();
      sides.rhs += -weights(i, j) * d2;
    }
  }
  return sides;
}

IdentitySides check_distance_identity(const DenseMatrix& x, const DenseMatrix& y,
                           const LaplacianSpec& laplacian, const DenseMatrix& u,
                           const DenseMatrix& v) {
  EIGENPRIOR_REQUIRE(laplacian.is_strict(), "the distance identity needs a strict Laplacian");
  return projection_distance_sides(x, y, laplacian.matrix(), u, v);
}

double distance_objective(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& u,
                       const DenseMatrix& v) {
  EIGENPRIOR_REQUIRE(x.rows() == y.rows(), "X and Y must have the same number of rows");
  EIGENPRIOR_REQUIRE(u.rows() == x.cols() && v.rows() == y.cols() && u.cols() == v.cols(),
                     "projection shapes do not match X and Y");
  const DenseMatrix px = x * u;
  const DenseMatrix py = y * v;
  const Eigen::Index n = x.rows();
  double all_pairs = 0.0;
  double same = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d2 = 0.5 * (px.row(i) - py.row(j)).squaredNorm();
      all_pairs += d2;
      if (i == j) same += d2;
    }
  }
  return all_pairs - static_cast<double>(n) * same;
}

double cca_correlation(const DenseMatrix& x, const DenseMatrix& y, const DenseVector& a,
                       const DenseVector& b) {
  EIGENPRIOR_REQUIRE(x.rows() == y.rows(), "X and Y must have the same number of rows");
  EIGENPRIOR_REQUIRE(a.size() == x.cols() && b.size() == y.cols(), "direction size mismatch");
  const DenseVector p = x * a;
  const DenseVector q = y * b;
  const DenseVector pc = p.array() - p.mean();
  const DenseVector qc = q.array() - q.mean();
  const double sp = pc.norm();
  const double sq = qc.norm();
  const double floor = 1e-14;
  if (sp <= floor * std::max(1.0, p.cwiseAbs().maxCoeff()) ||
      sq <= floor * std::max(1.0, q.cwiseAbs().maxCoeff())) {
    throw InputError("degenerate projection");
  }
  return std::clamp(pc.dot(qc) / (sp * sq), -1.0, 1.0);
}

std::pair<DenseMatrix, DenseMatrix> canonical_directions(const DenseMatrix& x,
                                                         const DenseMatrix& y, Eigen::Index m) {
  EIGENPRIOR_REQUIRE(x.rows() == y.rows(), "X and Y must have the same number of rows");
  EIGENPRIOR_REQUIRE(m >= 1 && m <= std::min(x.cols(), y.cols()), "m must be in [1, min(d, d')]");
  const DenseMatrix xc = center_columns(x);
  const DenseMatrix yc = center_columns(y);
  const auto inv_sqrt = [](const DenseMatrix& c) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(c);
    const DenseVector ev = es.eigenvalues();
    EIGENPRIOR_REQUIRE(ev.minCoeff() > 1e-12 * std::max(1.0, ev.maxCoeff()),
                       "view covariance is singular");
    return DenseMatrix(es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose());
  };
  const DenseMatrix wx = inv_sqrt(xc.transpose() * xc);
  const DenseMatrix wy = inv_sqrt(yc.transpose() * yc);
  const SvdFactors f = dense_svd(wx * (xc.transpose() * yc) * wy);
  return {wx * f.U.leftCols(m), wy * f.V.leftCols(m)};
}

}  // namespace eigenprior
