#pragma once

#include "pathsel/common.hpp"
#include "pathsel/hyperparameters.hpp"
#include "pathsel/membership.hpp"
#include "pathsel/model_state.hpp"
#include "pathsel/network.hpp"

#include <vector>

namespace pathsel {

// A (theta, gamma) pair is valid iff
//   (1) every selected pathway contains at least one selected gene,
//   (2) every selected gene belongs to at least one selected pathway,
//   (3) no two selected pathways have identical selected-gene subsets.
enum class ViolationKind { empty_pathway, orphan_gene, duplicate_subset };

struct Violation {
  ViolationKind kind;
  std::vector<int> indices;  // pathway index / gene index / {pathway, pathway}
};

struct ValidityReport {
  bool valid = true;
  std::vector<Violation> violations;
};

ValidityReport check_validity(const PathwayMembership& membership, const ModelState& state);

// Independent Bernoulli(phi_star) pathway inclusion.
double theta_log_prior(const BinaryVector& theta, double phi_star);

// Unnormalized MRF log mass: mu * sum(gamma) + eta * gamma' R gamma, with R
// the symmetric adjacency (each selected-selected edge counts twice).
double mrf_log_unnormalized(const BinaryVector& gamma, const GeneNetwork& network,
                            double mu, double eta);

// Full conditional P(gamma_j = 1 | gamma_-j) = logistic(mu + 2 eta s_j) where
// s_j is the number of selected neighbors of j.
double mrf_conditional(const BinaryVector& gamma, int j, const GeneNetwork& network,
                       double mu, double eta);

// Unnormalized joint log prior of (theta, gamma): pathway prior plus the MRF
// term evaluated on the active adjacency for theta.  Both states of a move
// are scored on their own active adjacency; the (eta-dependent) global
// normalizing constant over valid configurations is common to all states and
// cancels in Metropolis ratios at fixed eta.  Invalid states have mass zero
// (-inf is returned).
double joint_log_prior(const ModelState& state, const PathwayMembership& membership,
                       const GeneNetwork& network, const Hyperparameters& hp,
                       EdgeRule rule = EdgeRule::union_membership);

// Same, with the active adjacency already computed by the caller.
double joint_log_prior_active(const ModelState& state, const PathwayMembership& membership,
                              const GeneNetwork& active, const Hyperparameters& hp);

// Beta(c0, d0) density for eta / eta_pt, in log scale (includes the 1/eta_pt
// Jacobian).  Returns -inf outside [0, eta_pt].
double eta_log_prior(double eta, const Hyperparameters& hp);

}  // namespace pathsel
