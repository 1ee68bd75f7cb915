#pragma once

#include "pathsel/common.hpp"
#include "pathsel/dataset.hpp"
#include "pathsel/membership.hpp"
#include "pathsel/model_state.hpp"

#include <vector>

namespace pathsel {

// First latent component of a supervised (PLS-style) decomposition of the
// rank-one cross-covariance between the selected columns of x and y: the
// loading is cov(x, y) / ||cov(x, y)|| and the score is x * loading.  The
// sign is fixed so that cov(score, y) >= 0.  `degenerate` is set when the
// cross-covariance vanishes (scores are then identically zero).
struct PlsResult {
  Vector scores;
  Vector loading;
  bool degenerate = false;
};
PlsResult pls_first_component(const Matrix& x_sub, const Vector& y);

// First principal component of the columns of x_sub (assumed centered; for a
// test set, centered with training means).  If `alignment` is given, the sign
// is chosen so that dot(scores, alignment) >= 0; ties and a missing alignment
// fall back to making the largest-magnitude loading entry positive.
struct PcaResult {
  Vector scores;
  Vector loading;
};
PcaResult pca_first_component(const Matrix& x_sub, const Vector* alignment = nullptr);

// One score column per selected pathway, built from that pathway's selected
// genes.  Columns are ordered by pathway index.
struct ScoreMatrix {
  Matrix scores;                              // n x k_theta
  std::vector<int> pathway_indices;           // column -> pathway
  std::vector<std::vector<int>> gene_lists;   // column -> selected member genes
  std::vector<Vector> loadings;               // column -> PLS loading
};

// `y` is the regression response the loadings are supervised by: the observed
// response for continuous outcomes, the current latent Z under survival.
ScoreMatrix build_score_matrix(const Matrix& expression, const Vector& y,
                               const PathwayMembership& membership, const ModelState& state);
ScoreMatrix build_score_matrix(const Dataset& data, const PathwayMembership& membership,
                               const ModelState& state);

}  // namespace pathsel
