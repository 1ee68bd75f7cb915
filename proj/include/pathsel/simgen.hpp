#pragma once

#include "pathsel/common.hpp"
#include "pathsel/dataset.hpp"
#include "pathsel/membership.hpp"
#include "pathsel/network.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pathsel {

struct SimConfig {
  int n_samples = 100;
  int n_true_pathways = 4;
  double beta_magnitude = 0.5;  // |beta|; signs alternate across true pathways
  double rho = 0.7;             // parent-child regression weight
  double noise_sd = 1.0;        // sd of the response noise
  // When set, a child regresses on the mean of its parents instead of their
  // sum, which keeps the marginal variance bounded on dense graphs.
  bool average_parents = false;
};

// Ground truth of a simulated dataset.
struct SimTruth {
  std::vector<int> true_pathways;        // sorted pathway indices
  std::vector<int> true_genes;           // sorted gene indices
  std::vector<double> beta;              // per true gene, aligned with true_genes
  double rho = 0.7;
  std::uint64_t seed = 0;
};

// Picks n_true_pathways pathways at random; per picked pathway one seed gene
// at random, plus the seed's direct network neighbors lying inside the union
// of the picked pathways.  Each true pathway contributes the sign
// (-1)^(position) to its genes' beta (a gene in several true pathways takes
// the sign of the first one that contains it).
SimTruth select_truth(const PathwayMembership& membership, const GeneNetwork& network,
                      const SimConfig& config, Rng& rng);

// Expression for the true genes is generated along a directed ordering of the
// network restricted to the true genes (multi-root breadth-first orientation;
// equal-depth edges oriented by gene index): roots are standard normal and
// each child is N(rho * sum(parents), 1).  All other genes are iid standard
// normal.  The response is Y = sum_j X_j beta_j + N(0, noise_sd^2).
struct SimData {
  Matrix expression;  // raw, n_samples x n_genes
  Vector response;
};
SimData generate(const PathwayMembership& membership, const GeneNetwork& network,
                 const SimTruth& truth, const SimConfig& config, Rng& rng);

// Survival-outcome utility (an extension of the generator, not part of the
// reference protocol): interprets the continuous response as log event time;
// a sample is censored with probability censor_fraction, in which case its
// time shrinks to time * exp(-E), E ~ Exp(1), and delta = 0.
void apply_random_censoring(Vector& response, std::vector<std::uint8_t>& delta,
                            double censor_fraction, Rng& rng);

// Synthetic pathway/network structure: n_pathways blocks of
// [genes_per_pathway_min, genes_per_pathway_max] genes, a fraction of each
// block reused from previously allocated genes (overlap), each pathway wired
// as a random spanning tree plus extra random in-pathway edges.  Every gene
// belongs to at least one pathway by construction.
struct StructureConfig {
  int n_pathways = 20;
  int genes_per_pathway_min = 10;
  int genes_per_pathway_max = 20;
  double overlap_fraction = 0.15;
  double extra_edge_rate = 0.5;  // extra edges per member beyond the tree
};
std::pair<PathwayMembership, GeneNetwork> random_structure(const StructureConfig& config,
                                                           Rng& rng);

// Writes membership.txt, network.txt, expression.csv, response.csv, and
// truth.csv into out_dir (created if missing).  `delta` may be empty for a
// continuous outcome.
void write_simulation(const std::string& out_dir, const PathwayMembership& membership,
                      const GeneNetwork& network, const SimData& data, const SimTruth& truth,
                      const std::vector<std::uint8_t>& delta);

}  // namespace pathsel
