#pragma once

#include "pathsel/common.hpp"
#include "pathsel/dataset.hpp"
#include "pathsel/hyperparameters.hpp"
#include "pathsel/membership.hpp"
#include "pathsel/sampler.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace pathsel {

// Posterior estimators pool the post-burn-in records of all given chains.

// Marginal posterior inclusion probability per pathway.
Vector pathway_marginals(const std::vector<ChainTrace>& traces);

// Conditional posterior inclusion probability per gene, conditioned on the
// records where at least one pathway of `pathway_set` containing the gene is
// selected.  Genes that never qualify get probability 0 with
// ever_qualified = 0 so callers can distinguish "never conditioned" from
// "conditioned but never selected".
struct GeneConditionals {
  Vector probability;
  std::vector<std::uint8_t> ever_qualified;
};
GeneConditionals gene_conditionals(const std::vector<ChainTrace>& traces,
                                   const PathwayMembership& membership,
                                   const std::vector<int>& pathway_set);

// Pearson correlation of pathway marginal probabilities between two chains;
// unset when either chain has zero variance across pathways.
std::optional<double> chain_concordance(const ChainTrace& a, const ChainTrace& b);

// Distinct visited (theta, gamma) models ranked by visit count (descending),
// ties broken lexicographically on (theta, gamma) hex for determinism.
struct ModelCount {
  BinaryVector theta;
  BinaryVector gamma;
  std::int64_t count = 0;
};
std::vector<ModelCount> top_models(const std::vector<ChainTrace>& traces, int max_models);

// Thresholded posterior selection: pathways at `pathway_threshold` on the
// marginals, genes at `gene_threshold` on the conditionals given the selected
// pathways, then repaired to a valid configuration (orphan genes dropped,
// gene-less pathways dropped, duplicated subsets deduplicated keeping the
// pathway with the larger marginal).
struct Selection {
  BinaryVector theta;
  BinaryVector gamma;
};
Selection threshold_selection(const std::vector<ChainTrace>& traces,
                              const PathwayMembership& membership, double pathway_threshold,
                              double gene_threshold);

// Test-set prediction for a given selection: per selected pathway, the first
// principal component of the training expression over its selected genes
// (sign-aligned to the supervised scores), ridge coefficients
// (T'T + I/h)^{-1} T'y on the training scores, and test scores built with the
// training loadings and training column means.
Vector predict(const Dataset& train, const Dataset& test, const PathwayMembership& membership,
               const Selection& selection, const Hyperparameters& hp);

// Mean squared error of predictions against the observed response; under a
// survival outcome only uncensored samples (observed events) contribute.
double prediction_mse(const Vector& predicted, const Dataset& test);

// --------------------------------------------------------------------------
// CSV output (stable formatting: %.10g for probabilities and predictions)
// --------------------------------------------------------------------------

void write_pathway_marginals_csv(std::ostream& out, const PathwayMembership& membership,
                                 const Vector& marginals);
void write_gene_conditionals_csv(std::ostream& out, const PathwayMembership& membership,
                                 const GeneConditionals& conditionals);
void write_predictions_csv(std::ostream& out, const std::vector<std::string>& sample_ids,
                           const Vector& predicted);
void write_models_csv(std::ostream& out, const std::vector<ModelCount>& models,
                      std::int64_t total_records);
// Per-iteration summaries (iteration,k_theta,n_genes,eta,log_posterior).
void write_trace_csv(std::ostream& out, const ChainTrace& trace);
// Full states (iteration,theta_hex,gamma_hex,eta,log_posterior).
void write_states_csv(std::ostream& out, const ChainTrace& trace);

}  // namespace pathsel
