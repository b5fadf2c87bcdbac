#ifndef BOTMATCH_KATZ_HPP
#define BOTMATCH_KATZ_HPP

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "botmatch/embedding.hpp"
#include "botmatch/error.hpp"
#include "botmatch/graph.hpp"
#include "botmatch/linalg.hpp"

namespace botmatch {

/// Katz proximity S = Σ_{k>=1} α^k A^k.
struct KatzMatrix {
  Eigen::MatrixXd s;
  double alpha = 0.0;
  double lambda_max = 0.0;
  double residual = 0.0;  // ‖S − αA(I + S)‖_F
};

/// Spectral radius of a non-negative matrix by power iteration on |A| + I
/// (the shift makes the iteration aperiodic; ρ(|A| + I) = ρ(|A|) + 1).
inline double spectral_radius(const Eigen::MatrixXd& a, int steps = 100) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  const Eigen::MatrixXd shifted = a.cwiseAbs() + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 1.0;
  for (int i = 0; i < steps; ++i) {
    Eigen::VectorXd y = shifted * x;
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    lambda = x.dot(y);
    x = y / norm;
  }
  // Rayleigh-quotient estimate of the shifted matrix, shifted back.
  lambda = x.dot(shifted * x);
  const double rho = lambda - 1.0;
  return rho < 1e-12 ? 0.0 : rho;
}

inline double default_katz_alpha(double lambda_max) {
  return lambda_max > 0.0 ? 0.5 / lambda_max : 0.5;
}

/// Closed form S = (I − αA)^{-1} − I for a dense adjacency matrix.
/// Requires α · λ_max < 1.
inline KatzMatrix katz_matrix(const Eigen::MatrixXd& a, double alpha) {
  if (alpha <= 0.0) fail(ErrorKind::spectral, "Katz attenuation must be positive");
  KatzMatrix k;
  k.alpha = alpha;
  k.lambda_max = spectral_radius(a);
  if (alpha * k.lambda_max >= 1.0) {
    fail(ErrorKind::spectral, "Katz attenuation " + std::to_string(alpha) +
                                  " is not below 1/lambda_max = " +
                                  std::to_string(1.0 / k.lambda_max));
  }
  const Eigen::Index n = a.rows();
  if (n == 0) return k;
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(identity - alpha * a);
  if (!lu.isInvertible()) fail(ErrorKind::spectral, "I - alpha*A is singular");
  // (I − αA)^{-1} − I = (I − αA)^{-1} αA; solving against αA avoids cancellation.
  k.s = lu.solve(alpha * a);
  k.residual = (k.s - alpha * a * (identity + k.s)).norm();
  if (!k.s.allFinite()) fail(ErrorKind::spectral, "Katz matrix has non-finite entries");
  return k;
}

inline KatzMatrix katz_matrix(const CommGraph& g, double alpha,
                              std::size_t dense_cap = kDefaultDenseCap) {
  return katz_matrix(dense_adjacency(g, dense_cap), alpha);
}

struct HopeResult {
  EmbeddingSpace space;  // rows are [source half | target half]
  Eigen::MatrixXd source;
  Eigen::MatrixXd target;
  Eigen::VectorXd singular_values;
  double katz_residual = 0.0;
};

/// HOPE: rank-(D/2) SVD of the Katz matrix, Y_s = U√Σ and Y_t = V√Σ.
inline HopeResult hope_embed(const CommGraph& g, int dim, double alpha,
                             const SvdOptions& svd_opt = {}) {
  if (dim < 2 || dim % 2 != 0) fail(ErrorKind::config, "HOPE dimension must be even and >= 2");
  const auto half = static_cast<Eigen::Index>(dim / 2);
  if (static_cast<std::size_t>(half) > g.size()) {
    fail(ErrorKind::config, "HOPE needs D/2 <= N");
  }
  auto katz = katz_matrix(g, alpha);
  auto svd = truncated_svd(katz.s, half, svd_opt);
  const Eigen::VectorXd root = svd.values.cwiseSqrt();
  HopeResult r;
  r.source = svd.u * root.asDiagonal();
  r.target = svd.v * root.asDiagonal();
  r.singular_values = svd.values;
  r.katz_residual = katz.residual;
  r.space.name = "hope";
  r.space.ids = g.index().ids();
  r.space.vectors.resize(static_cast<Eigen::Index>(g.size()), dim);
  r.space.vectors.leftCols(half) = r.source;
  r.space.vectors.rightCols(half) = r.target;
  r.space.metric = Metric::cosine;
  r.space.kind = SpaceKind::network;
  r.space.seed = svd_opt.seed;
  r.space.validate();
  return r;
}

}  // namespace botmatch

#endif  // BOTMATCH_KATZ_HPP
