#include "pathsel/scores.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace pathsel {

PlsResult pls_first_component(const Matrix& x_sub, const Vector& y) {
  const int n = static_cast<int>(x_sub.rows());
  if (y.size() != n) throw std::invalid_argument("pls: x and y row mismatch");
  if (n < 2) throw std::invalid_argument("pls: need at least two samples");

  // Cross-covariance c = cov(x, y).  With a single response the first left
  // singular vector of c (a column) is c / ||c||; orienting the loading along
  // +c makes cov(score, y) = ||c|| >= 0, which fixes the sign convention.
  const double ybar = y.mean();
  const Vector yc = y.array() - ybar;
  Vector c = x_sub.transpose() * yc / static_cast<double>(n - 1);

  PlsResult r;
  const double norm = c.norm();
  if (norm <= 0 || !std::isfinite(norm)) {
    r.degenerate = true;
    r.loading = Vector::Zero(x_sub.cols());
    r.scores = Vector::Zero(n);
    return r;
  }
  r.loading = c / norm;
  r.scores = x_sub * r.loading;
  return r;
}

PcaResult pca_first_component(const Matrix& x_sub, const Vector* alignment) {
  const int n = static_cast<int>(x_sub.rows());
  const int m = static_cast<int>(x_sub.cols());
  if (n < 2) throw std::invalid_argument("pca: need at least two samples");

  const Matrix cov = x_sub.transpose() * x_sub / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca: eigendecomposition failed");
  const double top = eig.eigenvalues()[m - 1];
  if (!(top > 0)) throw std::runtime_error("pca: expression block has rank zero");

  PcaResult r;
  r.loading = eig.eigenvectors().col(m - 1);
  r.scores = x_sub * r.loading;

  double orient = 0.0;
  if (alignment != nullptr && alignment->size() == n) orient = r.scores.dot(*alignment);
  if (orient == 0.0) {
    // no (or orthogonal) alignment: make the largest-magnitude loading positive
    int imax = 0;
    for (int i = 1; i < m; ++i)
      if (std::abs(r.loading[i]) > std::abs(r.loading[imax])) imax = i;
    orient = r.loading[imax];
  }
  if (orient < 0) {
    r.loading = -r.loading;
    r.scores = -r.scores;
  }
  return r;
}

ScoreMatrix build_score_matrix(const Matrix& expression, const Vector& y,
                               const PathwayMembership& membership, const ModelState& state) {
  const int n = static_cast<int>(expression.rows());
  ScoreMatrix sm;
  sm.scores.resize(n, popcount(state.theta));
  int col = 0;
  for (int k = 0; k < membership.n_pathways; ++k) {
    if (!state.theta[k]) continue;
    std::vector<int> genes;
    for (int j : membership.genes_in_pathway[k])
      if (state.gamma[j]) genes.push_back(j);
    if (genes.empty())
      throw std::invalid_argument("score matrix: selected pathway " +
                                  membership.pathway_ids[k] + " has no selected genes");
    Matrix x_sub(n, static_cast<int>(genes.size()));
    for (std::size_t c = 0; c < genes.size(); ++c)
      x_sub.col(static_cast<int>(c)) = expression.col(genes[c]);
    PlsResult pls = pls_first_component(x_sub, y);
    sm.pathway_indices.push_back(k);
    sm.gene_lists.push_back(std::move(genes));
    sm.scores.col(col++) = pls.scores;
    sm.loadings.push_back(std::move(pls.loading));
  }
  return sm;
}

ScoreMatrix build_score_matrix(const Dataset& data, const PathwayMembership& membership,
                               const ModelState& state) {
  const Vector& y = (data.outcome_kind == OutcomeKind::survival && state.z_latent)
                        ? *state.z_latent
                        : data.response;
  return build_score_matrix(data.expression, y, membership, state);
}

}  // namespace pathsel
