#pragma once

#include "pathsel/common.hpp"
#include "pathsel/dataset.hpp"
#include "pathsel/hyperparameters.hpp"
#include "pathsel/scores.hpp"

namespace pathsel {

// Multivariate Student-t log density with location vector, positive-definite
// scale matrix, and df degrees of freedom.  Throws std::runtime_error
// ("scale not positive definite") if the Cholesky factorization fails.
double mvt_log_density(const Vector& y, const Vector& location, const Matrix& scale, double df);

// Marginal likelihood of the response given pathway scores T (n x K), with
// intercept, coefficients, and variance integrated out analytically:
//   y | T  ~  t_nu0( alpha0 1 + beta0 T 1,  sigma0_sq (I + h0 11' + h T T') ).
// K = 0 (intercept-only model) is allowed.
//
// `dense` evaluates the n x n scale directly; `lowrank` factorizes through
// the (K+1)-dimensional capacitance (Woodbury / matrix determinant lemma).
// `automatic` picks dense for n <= 64 and lowrank above.
enum class LikelihoodPath { automatic, dense, lowrank };

double marginal_log_likelihood(const Vector& response, const Matrix& scores,
                               const Hyperparameters& hp,
                               LikelihoodPath path = LikelihoodPath::automatic);

// Convenience overload: continuous outcomes use data.response, survival
// outcomes require the caller to pass the current Z via the vector overload.
double marginal_log_likelihood(const Dataset& data, const ScoreMatrix& scores,
                               const Hyperparameters& hp,
                               LikelihoodPath path = LikelihoodPath::automatic);

// Location vector and dense scale matrix of the marginalized model; shared by
// the dense likelihood path and the survival-data augmentation step.
Vector marginal_location(const Matrix& scores, const Hyperparameters& hp);
Matrix marginal_scale(const Matrix& scores, const Hyperparameters& hp);

}  // namespace pathsel
