#include "eigenprior/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "eigenprior/errors.hpp"
#include "parallel.hpp"

namespace eigenprior {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                           std::vector<std::uint32_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  EIGENPRIOR_REQUIRE(cols_ <= std::numeric_limits<std::uint32_t>::max(),
                     "column count exceeds 32-bit index range");
  EIGENPRIOR_REQUIRE(row_offsets_.size() == rows_ + 1, "row_offsets must have rows+1 entries");
  EIGENPRIOR_REQUIRE(row_offsets_.front() == 0 && row_offsets_.back() == values_.size(),
                     "row_offsets must start at 0 and end at nnz");
  EIGENPRIOR_REQUIRE(col_indices_.size() == values_.size(), "col_indices/values size mismatch");
  for (std::size_t r = 0; r < rows_; ++r) {
    EIGENPRIOR_REQUIRE(row_offsets_[r] <= row_offsets_[r + 1], "row_offsets must be non-decreasing");
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      EIGENPRIOR_REQUIRE(col_indices_[p] < cols_, "column index out of range");
      EIGENPRIOR_REQUIRE(p == row_offsets_[r] || col_indices_[p - 1] < col_indices_[p],
                         "column indices must be strictly increasing within a row");
      EIGENPRIOR_REQUIRE(std::isfinite(values_[p]), "sparse values must be finite");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(rows + 1, 0);
  std::vector<std::uint32_t> cols_out;
  std::vector<double> vals;
  cols_out.reserve(triplets.size());
  vals.reserve(triplets.size());
  std::size_t prev_row = rows, prev_col = cols;
  for (const auto& t : triplets) {
    EIGENPRIOR_REQUIRE(t.row < rows && t.col < cols, "triplet out of range");
    if (t.row == prev_row && t.col == prev_col) {
      vals.back() += t.value;
      continue;
    }
    cols_out.push_back(static_cast<std::uint32_t>(t.col));
    vals.push_back(t.value);
    ++offsets[t.row + 1];
    prev_row = t.row;
    prev_col = t.col;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  std::vector<Triplet> t;
  for (Eigen::Index r = 0; r < dense.rows(); ++r) {
    for (Eigen::Index c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        t.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), dense(r, c)});
      }
    }
  }
  return from_triplets(static_cast<std::size_t>(dense.rows()),
                       static_cast<std::size_t>(dense.cols()), std::move(t));
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> offsets(cols_ + 1, 0);
  for (const auto c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<std::uint32_t> cols_out(values_.size());
  std::vector<double> vals(values_.size());
  // Rows are visited in order, so each transposed row comes out sorted.
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      const std::size_t dst = cursor[col_indices_[p]]++;
      cols_out[dst] = static_cast<std::uint32_t>(r);
      vals[dst] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols_out), std::move(vals));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_),
                                      static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      out(static_cast<Eigen::Index>(r), col_indices_[p]) = values_[p];
    }
  }
  return out;
}

RowMajorMatrix SparseMatrix::multiply(const RowMajorMatrix& x, unsigned threads) const {
  EIGENPRIOR_REQUIRE(static_cast<std::size_t>(x.rows()) == cols_, "dimension mismatch in A*X");
  RowMajorMatrix out = RowMajorMatrix::Zero(static_cast<Eigen::Index>(rows_), x.cols());
  detail::parallel_blocks(rows_, threads, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t r = begin; r < end; ++r) {
      auto row = out.row(static_cast<Eigen::Index>(r));
      for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
        row.noalias() += values_[p] * x.row(col_indices_[p]);
      }
    }
  });
  return out;
}

DenseVector spmv(const SparseMatrix& a, const DenseVector& x) {
  EIGENPRIOR_REQUIRE(static_cast<std::size_t>(x.size()) == a.cols(), "dimension mismatch in A*x");
  DenseVector y = DenseVector::Zero(static_cast<Eigen::Index>(a.rows()));
  const auto& off = a.row_offsets();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t p = off[r]; p < off[r + 1]; ++p) acc += a.values()[p] * x[a.col_indices()[p]];
    y[static_cast<Eigen::Index>(r)] = acc;
  }
  return y;
}

DenseVector spmv_transpose(const SparseMatrix& a, const DenseVector& x) {
  EIGENPRIOR_REQUIRE(static_cast<std::size_t>(x.size()) == a.rows(),
                     "dimension mismatch in A^T*x");
  DenseVector y = DenseVector::Zero(static_cast<Eigen::Index>(a.cols()));
  const auto& off = a.row_offsets();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double xr = x[static_cast<Eigen::Index>(r)];
    for (std::size_t p = off[r]; p < off[r + 1]; ++p) y[a.col_indices()[p]] += a.values()[p] * xr;
  }
  return y;
}

void canonicalize_signs(SvdFactors& f) {
  for (Eigen::Index j = 0; j < f.U.cols(); ++j) {
    Eigen::Index arg = 0;
    f.U.col(j).cwiseAbs().maxCoeff(&arg);
    if (f.U.rows() > 0 && f.U(arg, j) < 0) {
      f.U.col(j) *= -1.0;
      if (j < f.V.cols()) f.V.col(j) *= -1.0;
    }
  }
}

namespace {

void check_dense_input(const DenseMatrix& a) {
  EIGENPRIOR_REQUIRE(static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(a.cols()) <=
                         kDenseSizeLimit,
                     "matrix too large for dense SVD");
  EIGENPRIOR_REQUIRE(a.allFinite(), "dense SVD input must be finite");
}

SvdFactors raw_dense_svd(const DenseMatrix& a) {
  SvdFactors f;
  if (a.rows() == 0 || a.cols() == 0) {
    f.U = DenseMatrix(a.rows(), 0);
    f.V = DenseMatrix(a.cols(), 0);
    f.S = DenseVector(0);
    return f;
  }
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  f.U = svd.matrixU();
  f.S = svd.singularValues();
  f.V = svd.matrixV();
  return f;
}

double max_relative_change(const DenseVector& now, const DenseVector& before) {
  const double top = now.size() > 0 ? now[0] : 0.0;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < now.size(); ++j) {
    const double denom = std::max(now[j], top * 1e-12);
    if (denom <= 0.0) continue;
    worst = std::max(worst, std::abs(now[j] - before[j]) / denom);
  }
  return worst;
}

RowMajorMatrix gaussian_block(std::size_t rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMajorMatrix out(static_cast<Eigen::Index>(rows), cols);
  // Column-major fill order keeps the stream layout independent of storage.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) = normal(rng);
  }
  return out;
}

}  // namespace

DenseMatrix orthonormalize(const DenseMatrix& x) {
  Eigen::HouseholderQR<DenseMatrix> qr(x);
  return qr.householderQ() * DenseMatrix::Identity(x.rows(), std::min(x.rows(), x.cols()));
}

SvdFactors dense_svd(const DenseMatrix& a) {
  check_dense_input(a);
  SvdFactors f = raw_dense_svd(a);
  canonicalize_signs(f);
  return f;
}

SvdFactors smallest_svd(const DenseMatrix& a, Eigen::Index m) {
  check_dense_input(a);
  const Eigen::Index r = std::min(a.rows(), a.cols());
  EIGENPRIOR_REQUIRE(m >= 0 && m <= r, "smallest_svd: m exceeds min(rows, cols)");
  const SvdFactors full = raw_dense_svd(a);
  SvdFactors f;
  f.ascending = true;
  f.U.resize(a.rows(), m);
  f.V.resize(a.cols(), m);
  f.S.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index src = r - 1 - j;
    f.U.col(j) = full.U.col(src);
    f.V.col(j) = full.V.col(src);
    f.S[j] = full.S[src];
  }
  canonicalize_signs(f);
  return f;
}

SvdFactors truncated_svd(const SparseMatrix& a, const TruncatedSvdOptions& options,
                         TruncatedSvdReport* report) {
  const auto rows = static_cast<Eigen::Index>(a.rows());
  const auto cols = static_cast<Eigen::Index>(a.cols());
  const Eigen::Index m = options.rank;
  EIGENPRIOR_REQUIRE(m >= 1 && m <= std::min(rows, cols),
                     "truncated_svd: rank must be in [1, min(rows, cols)]");
  EIGENPRIOR_REQUIRE(options.oversample >= 0, "truncated_svd: oversample must be >= 0");
  EIGENPRIOR_REQUIRE(options.power_iters >= 0, "truncated_svd: power_iters must be >= 0");
  const Eigen::Index block = std::min(m + options.oversample, std::min(rows, cols));
  const unsigned threads = std::max(1u, options.threads);
  const SparseMatrix at = a.transpose();

  // Q spans the current estimate of the leading left singular subspace.
  DenseMatrix q = orthonormalize(a.multiply(gaussian_block(a.cols(), block, options.seed), threads));

  TruncatedSvdReport local;
  DenseVector previous;
  const int max_iters = std::max(options.max_iters, options.power_iters);
  for (int iter = 0;; ++iter) {
    // A^T Q = Z R, and Q^T A = R^T Z^T, so the SVD of the small R gives the
    // Ritz triplets of A on the current subspace.
    Eigen::HouseholderQR<DenseMatrix> qr(DenseMatrix(at.multiply(RowMajorMatrix(q), threads)));
    DenseMatrix z = qr.householderQ() * DenseMatrix::Identity(cols, block);

    if (iter >= options.power_iters) {
      const DenseMatrix r = qr.matrixQR().topRows(block).triangularView<Eigen::Upper>();
      const SvdFactors small = raw_dense_svd(r);
      const DenseVector ritz = small.S.head(m);
      bool done = options.tolerance <= 0.0 || iter >= max_iters;
      if (previous.size() == m) {
        local.last_change = max_relative_change(ritz, previous);
        if (options.tolerance > 0.0 && local.last_change < options.tolerance) {
          local.converged = true;
          done = true;
        }
      }
      if (done) {
        // Q^T A = R^T Z^T = (Vr S Ur^T) Z^T  =>  U = Q Vr, V = Z Ur.
        SvdFactors f;
        f.U = q * small.V.leftCols(m);
        f.S = ritz;
        f.V = z * small.U.leftCols(m);
        canonicalize_signs(f);
        local.iterations = iter;
        local.converged = local.converged || options.tolerance <= 0.0;
        if (report) *report = local;
        return f;
      }
      previous = ritz;
    }
    q = orthonormalize(DenseMatrix(a.multiply(RowMajorMatrix(z), threads)));
  }
}

}  // namespace eigenprior
