#ifndef BOTMATCH_LINALG_HPP
#define BOTMATCH_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cstdint>

#include "botmatch/error.hpp"
#include "botmatch/random.hpp"
#include "botmatch/text.hpp"

namespace botmatch {

struct TruncatedSvd {
  Eigen::MatrixXd u;       // m x r
  Eigen::VectorXd values;  // r, descending
  Eigen::MatrixXd v;       // n x r
};

struct SvdOptions {
  int power_iters = 6;
  int oversample = 10;
  std::uint64_t seed = 0;
  // Exact dense SVD when min(m, n) is at most this and the dense copy is small.
  Eigen::Index exact_threshold = 500;
  Eigen::Index exact_max_entries = 8'000'000;
};

namespace detail {

// Each left singular vector gets its largest-magnitude entry positive so that
// results are reproducible across solvers.
inline void fix_signs(TruncatedSvd& svd) {
  for (Eigen::Index k = 0; k < svd.u.cols(); ++k) {
    Eigen::Index arg = 0;
    svd.u.col(k).cwiseAbs().maxCoeff(&arg);
    if (svd.u(arg, k) < 0.0) {
      svd.u.col(k) *= -1.0;
      svd.v.col(k) *= -1.0;
    }
  }
}

inline TruncatedSvd exact_svd(const Eigen::MatrixXd& a, Eigen::Index rank) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out{svd.matrixU().leftCols(rank), svd.singularValues().head(rank),
                   svd.matrixV().leftCols(rank)};
  fix_signs(out);
  return out;
}

inline Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

template <class Matrix>
TruncatedSvd randomized_svd(const Matrix& a, Eigen::Index rank, const SvdOptions& opt) {
  const Eigen::Index l = std::min<Eigen::Index>(rank + opt.oversample, std::min(a.rows(), a.cols()));
  Rng rng(splitmix64(opt.seed));
  Eigen::MatrixXd omega(a.cols(), l);
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) omega(i, j) = standard_normal(rng);
  }
  Eigen::MatrixXd q = orthonormal_basis(a * omega);
  for (int it = 0; it < opt.power_iters; ++it) {
    Eigen::MatrixXd z = orthonormal_basis(a.transpose() * q);
    q = orthonormal_basis(a * z);
  }
  Eigen::MatrixXd b = q.transpose() * a;  // l x n
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out{q * svd.matrixU().leftCols(rank), svd.singularValues().head(rank),
                   svd.matrixV().leftCols(rank)};
  fix_signs(out);
  return out;
}

}  // namespace detail

/// Rank-`rank` SVD of a dense matrix. Exact for small matrices, randomized
/// subspace iteration otherwise.
inline TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, Eigen::Index rank,
                                  const SvdOptions& opt = {}) {
  if (rank < 1 || rank > std::min(a.rows(), a.cols())) {
    fail(ErrorKind::config, "SVD rank " + std::to_string(rank) + " exceeds min(" +
                                std::to_string(a.rows()) + ", " + std::to_string(a.cols()) + ")");
  }
  if (std::min(a.rows(), a.cols()) <= opt.exact_threshold) return detail::exact_svd(a, rank);
  return detail::randomized_svd(a, rank, opt);
}

inline Eigen::SparseMatrix<double, Eigen::RowMajor> to_sparse(const DocTermMatrix& m) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (const auto& e : m.row(i)) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(e.term), e.value);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> s(static_cast<Eigen::Index>(m.rows()),
                                                 static_cast<Eigen::Index>(m.cols()));
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

inline TruncatedSvd truncated_svd(const DocTermMatrix& m, Eigen::Index rank,
                                  const SvdOptions& opt = {}) {
  const auto rows = static_cast<Eigen::Index>(m.rows());
  const auto cols = static_cast<Eigen::Index>(m.cols());
  if (rank < 1 || rank > std::min(rows, cols)) {
    fail(ErrorKind::config, "SVD rank " + std::to_string(rank) + " exceeds min(" +
                                std::to_string(rows) + ", " + std::to_string(cols) + ")");
  }
  auto sparse = to_sparse(m);
  if (std::min(rows, cols) <= opt.exact_threshold && rows * cols <= opt.exact_max_entries) {
    return detail::exact_svd(Eigen::MatrixXd(sparse), rank);
  }
  return detail::randomized_svd(sparse, rank, opt);
}

struct Pca {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd components;  // d x k, orthonormal columns
  Eigen::MatrixXd scores;      // n x k
};

/// Top-k principal components of the rows of `x`.
inline Pca pca(const Eigen::MatrixXd& x, Eigen::Index k) {
  if (k < 1 || k > x.cols()) fail(ErrorKind::config, "PCA dimension out of range");
  Pca out;
  out.mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - out.mean;
  const Eigen::Index r = std::min(centered.rows(), centered.cols());
  if (r == 0) fail(ErrorKind::config, "PCA of an empty matrix");
  auto svd = detail::exact_svd(centered, std::min(k, r));
  out.components = Eigen::MatrixXd::Zero(x.cols(), k);
  out.components.leftCols(svd.v.cols()) = svd.v;
  // Pad with an orthonormal completion when n < k.
  if (svd.v.cols() < k) {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(x.cols(), x.cols());
    Eigen::Index col = svd.v.cols();
    for (Eigen::Index j = 0; j < x.cols() && col < k; ++j) {
      Eigen::VectorXd c = basis.col(j);
      for (Eigen::Index p = 0; p < col; ++p) c -= out.components.col(p).dot(c) * out.components.col(p);
      if (c.norm() > 1e-8) out.components.col(col++) = c.normalized();
    }
  }
  out.scores = centered * out.components;
  return out;
}

}  // namespace botmatch

#endif  // BOTMATCH_LINALG_HPP
