#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "eigenprior/accumulate.hpp"
#include "eigenprior/embedding.hpp"
#include "eigenprior/linalg.hpp"

namespace eigenprior {

// Alpha values used for sweeps when none are given.
inline const std::vector<double> kDefaultAlphaGrid = {0.1, 0.2, 0.5, 0.7, 0.9};

// Whitened co-occurrence matrix (|H| x 2k|H|):
//
//   entry(r, s) = g(unit + alpha * prior) / (sqrt(g(d1[r])) * sqrt(g(d2[s])))
//
// with g the element-wise square root when `sqrt_transform` is set and the
// identity otherwise. Cells whose row or column count is zero, and cells that
// evaluate to exactly zero, are not stored.
SparseMatrix scale(const CooccurrenceStats& stats, double alpha, bool sqrt_transform);

struct EmbedOptions {
  Eigen::Index dim = 300;
  double alpha = 0.0;
  bool sqrt_transform = true;
  bool d1_projection = true;  // false returns raw rows of U
  bool context = false;       // also produce D2^{-1/2} V
  TruncatedSvdOptions svd;
};

struct EmbedResult {
  EmbeddingSet words;
  std::optional<EmbeddingSet> contexts;
  DenseVector singular_values;
  TruncatedSvdReport svd_report;
  std::size_t zero_count_words = 0;  // rows with d1 == 0, emitted as zero vectors
};

// Word vectors D1^{-1/2} U from the rank-`dim` factorization of scale().
// The data is never centered. D1 here means the same g(d1) used in scale().
EmbedResult embed(const CooccurrenceStats& stats, const Vocabulary& vocab,
                  const EmbedOptions& options);

// Label for a context slot, e.g. "potter@-1".
std::string context_slot_label(const Vocabulary& vocab, std::size_t window, std::uint64_t slot);

// Dense symmetric n x n weight matrix for the reference Laplacian CCA.
class LaplacianSpec {
 public:
  enum class Kind {
    kStrict,   // symmetric, rows sum to 0, off-diagonals <= 0
    kRelaxed,  // symmetric only
  };

  // Throws ContractViolation when `matrix` does not satisfy `kind`.
  LaplacianSpec(DenseMatrix matrix, Kind kind);

  // n-1 on the diagonal, -1 elsewhere.
  static LaplacianSpec uniform(Eigen::Index n);
  // D - A for a symmetric non-negative weight matrix A (diagonal ignored).
  static LaplacianSpec from_weights(const DenseMatrix& weights);
  // 1 on the diagonal, 0 for adjacent pairs, alpha for non-adjacent pairs.
  static LaplacianSpec relaxed_prior(const DenseMatrix& adjacency, double alpha);

  Eigen::Index size() const { return matrix_.rows(); }
  const DenseMatrix& matrix() const { return matrix_; }
  Kind kind() const { return kind_; }
  bool is_strict() const { return kind_ == Kind::kStrict; }

 private:
  DenseMatrix matrix_;
  Kind kind_;
};

enum class CcaMode { kMaximize, kMinimize };

// Factors of X^T L Y: top-m triplets (maximize) or bottom-m (minimize).
SvdFactors laplacian_cca_reference(const DenseMatrix& x, const DenseMatrix& y,
                                   const LaplacianSpec& laplacian, Eigen::Index m, CcaMode mode);

DenseMatrix center_columns(const DenseMatrix& x);

// Centers X and Y, then returns max |X^T L Y - n X^T Y| for the uniform L.
double check_uniform_laplacian(const DenseMatrix& x, const DenseMatrix& y);

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

// lhs = sum_k (X u_k)^T L (Y v_k); rhs = sum_{i,j} -L_ij (d_ij)^2 with
// d_ij^2 = 1/2 sum_k ([X u_k]_i - [Y v_k]_j)^2. Requires a strict Laplacian.
IdentitySides check_distance_identity(const DenseMatrix& x, const DenseMatrix& y,
                           const LaplacianSpec& laplacian, const DenseMatrix& u,
                           const DenseMatrix& v);

// Same two sides for an arbitrary n x n matrix, with no validation.
IdentitySides projection_distance_sides(const DenseMatrix& x, const DenseMatrix& y,
                                        const DenseMatrix& weights, const DenseMatrix& u,
                                        const DenseMatrix& v);

// sum_{i,j} d_ij^2 - n sum_i d_ii^2 for the projections (U, V).
double distance_objective(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& u,
                       const DenseMatrix& v);

// Pearson correlation of X a and Y b. Throws InputError("degenerate
// projection") when either projection has zero variance.
double cca_correlation(const DenseMatrix& x, const DenseMatrix& y, const DenseVector& a,
                       const DenseVector& b);

// Full-covariance CCA directions for small dense two-view data (columns of
// the returned pair are a_j and b_j, leading pair first).
std::pair<DenseMatrix, DenseMatrix> canonical_directions(const DenseMatrix& x,
                                                         const DenseMatrix& y, Eigen::Index m);

}  // namespace eigenprior
