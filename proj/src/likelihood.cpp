#include "pathsel/likelihood.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace pathsel {

namespace {

constexpr int kDenseMaxSamples = 64;  // automatic path switch point

double mvt_log_density_from_parts(int n, double df, double log_det_scale, double quad) {
  // Student-t in scale-matrix parameterization:
  //   log f = lgamma((df+n)/2) - lgamma(df/2) - (n/2) log(df pi)
  //           - log|Scale|/2 - ((df+n)/2) log(1 + quad/df)
  return log_gamma(0.5 * (df + n)) - log_gamma(0.5 * df) -
         0.5 * n * std::log(df * M_PI) - 0.5 * log_det_scale -
         0.5 * (df + n) * std::log1p(quad / df);
}

}  // namespace

Vector marginal_location(const Matrix& scores, const Hyperparameters& hp) {
  const int n = static_cast<int>(scores.rows());
  Vector loc = Vector::Constant(n, hp.alpha0);
  if (scores.cols() > 0) loc += hp.beta0 * scores.rowwise().sum();
  return loc;
}

Matrix marginal_scale(const Matrix& scores, const Hyperparameters& hp) {
  const int n = static_cast<int>(scores.rows());
  Matrix scale = Matrix::Identity(n, n);
  scale.array() += hp.h0;
  if (scores.cols() > 0) scale += hp.h * scores * scores.transpose();
  scale *= hp.sigma0_sq;
  return scale;
}

double mvt_log_density(const Vector& y, const Vector& location, const Matrix& scale, double df) {
  const int n = static_cast<int>(y.size());
  if (location.size() != n || scale.rows() != n || scale.cols() != n)
    throw std::invalid_argument("mvt: dimension mismatch");
  if (!(df > 0)) throw std::invalid_argument("mvt: df must be positive");

  Eigen::LLT<Matrix> llt(scale);
  if (llt.info() != Eigen::Success) throw std::runtime_error("scale not positive definite");

  const Matrix& l = llt.matrixLLT();
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(l(i, i));

  const Vector u = llt.matrixL().solve(y - location);
  return mvt_log_density_from_parts(n, df, log_det, u.squaredNorm());
}

namespace {

double marginal_dense(const Vector& y, const Matrix& scores, const Hyperparameters& hp) {
  return mvt_log_density(y, marginal_location(scores, hp), marginal_scale(scores, hp), hp.nu0);
}

double marginal_lowrank(const Vector& y, const Matrix& scores, const Hyperparameters& hp) {
  // Scale = sigma0_sq (I + W D W') with W = [1 | T] (n x (K+1)) and
  // D = diag(h0, h, ..., h).  Woodbury gives the quadratic form and the
  // matrix determinant lemma the log determinant through the (K+1)-capacitance
  //   M = D^{-1} + W'W:
  //   quad = (r'r - r'W M^{-1} W'r) / sigma0_sq,
  //   log|Scale| = n log sigma0_sq + log|D| + log|M|.
  const int n = static_cast<int>(y.size());
  const int k = static_cast<int>(scores.cols());

  Matrix w(n, k + 1);
  w.col(0).setOnes();
  if (k > 0) w.rightCols(k) = scores;

  Vector d_inv(k + 1);
  d_inv[0] = 1.0 / hp.h0;
  for (int i = 1; i <= k; ++i) d_inv[i] = 1.0 / hp.h;

  Matrix m = w.transpose() * w;
  m.diagonal() += d_inv;

  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("scale not positive definite");
  const Matrix& l = llt.matrixLLT();

  double log_det_m = 0.0;
  for (int i = 0; i <= k; ++i) log_det_m += 2.0 * std::log(l(i, i));
  const double log_det_d = std::log(hp.h0) + k * std::log(hp.h);
  const double log_det_scale = n * std::log(hp.sigma0_sq) + log_det_d + log_det_m;

  const Vector r = y - marginal_location(scores, hp);
  const Vector wr = w.transpose() * r;
  const Vector u = llt.matrixL().solve(wr);
  const double quad = (r.squaredNorm() - u.squaredNorm()) / hp.sigma0_sq;

  return mvt_log_density_from_parts(n, hp.nu0, log_det_scale, quad);
}

}  // namespace

double marginal_log_likelihood(const Vector& response, const Matrix& scores,
                               const Hyperparameters& hp, LikelihoodPath path) {
  const int n = static_cast<int>(response.size());
  if (scores.rows() != n) throw std::invalid_argument("likelihood: score row mismatch");
  switch (path) {
    case LikelihoodPath::dense:
      return marginal_dense(response, scores, hp);
    case LikelihoodPath::lowrank:
      return marginal_lowrank(response, scores, hp);
    case LikelihoodPath::automatic:
    default:
      return n <= kDenseMaxSamples ? marginal_dense(response, scores, hp)
                                   : marginal_lowrank(response, scores, hp);
  }
}

double marginal_log_likelihood(const Dataset& data, const ScoreMatrix& scores,
                               const Hyperparameters& hp, LikelihoodPath path) {
  return marginal_log_likelihood(data.response, scores.scores, hp, path);
}

}  // namespace pathsel
