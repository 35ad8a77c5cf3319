#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace eigenprior {

using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Largest d*d' accepted by the dense solvers.
inline constexpr std::size_t kDenseSizeLimit = 4'000'000;

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row storage. Column indices are strictly increasing
// within each row and every stored value is finite.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::uint32_t> col_indices, std::vector<double> values);

  // Duplicate coordinates are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets);
  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }
  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::uint32_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;

  // this * X. Rows are split across `threads`; each output row is reduced in
  // storage order, so the result does not depend on the thread count.
  RowMajorMatrix multiply(const RowMajorMatrix& x, unsigned threads = 1) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::uint32_t> col_indices_;
  std::vector<double> values_;
};

DenseVector spmv(const SparseMatrix& a, const DenseVector& x);
DenseVector spmv_transpose(const SparseMatrix& a, const DenseVector& x);

// A ~= U diag(S) V^T with orthonormal columns in U and V. S is
// non-increasing unless `ascending` is set (smallest_svd).
struct SvdFactors {
  DenseMatrix U;
  DenseVector S;
  DenseMatrix V;
  bool ascending = false;

  Eigen::Index rank() const { return S.size(); }
};

// Flips column pairs (u_j, v_j) so the largest-magnitude entry of u_j is
// positive (first such entry on ties).
void canonicalize_signs(SvdFactors& f);

// Thin SVD with min(d, d') triplets.
SvdFactors dense_svd(const DenseMatrix& a);

// The m triplets with the smallest singular values, S non-decreasing.
SvdFactors smallest_svd(const DenseMatrix& a, Eigen::Index m);

struct TruncatedSvdOptions {
  Eigen::Index rank = 10;
  Eigen::Index oversample = 10;
  int power_iters = 3;       // minimum number of subspace iterations
  double tolerance = 1e-10;  // stop once Ritz values move less than this (relative); <= 0 disables
  int max_iters = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct TruncatedSvdReport {
  int iterations = 0;
  bool converged = false;
  double last_change = 0.0;
};

// Top-`rank` singular triplets by randomized subspace iteration: a Gaussian
// test block of rank + oversample columns drawn from `seed`, at least
// `power_iters` rounds of orthonormalized A^T/A products, then further rounds
// until the leading Ritz values settle to `tolerance` or `max_iters` is hit.
SvdFactors truncated_svd(const SparseMatrix& a, const TruncatedSvdOptions& options,
                         TruncatedSvdReport* report = nullptr);

// Orthonormal basis of the column space of `x` (thin Householder QR).
DenseMatrix orthonormalize(const DenseMatrix& x);

}  // namespace eigenprior
