#include "pathsel/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace pathsel {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ValidityReport check_validity(const PathwayMembership& membership, const ModelState& state) {
  ValidityReport report;
  const int k_count = membership.n_pathways;
  const int p = membership.n_genes;
  if (static_cast<int>(state.theta.size()) != k_count || static_cast<int>(state.gamma.size()) != p)
    throw std::invalid_argument("check_validity: state dimensions do not match membership");

  // (1) selected pathways need a selected gene; collect subsets as we go
  std::map<std::vector<int>, int> subset_owner;
  for (int k = 0; k < k_count; ++k) {
    if (!state.theta[k]) continue;
    std::vector<int> subset;
    for (int j : membership.genes_in_pathway[k])
      if (state.gamma[j]) subset.push_back(j);
    if (subset.empty()) {
      report.violations.push_back({ViolationKind::empty_pathway, {k}});
      continue;
    }
    // (3) identical subsets across two selected pathways
    auto [it, inserted] = subset_owner.try_emplace(std::move(subset), k);
    if (!inserted) report.violations.push_back({ViolationKind::duplicate_subset, {it->second, k}});
  }

  // (2) selected genes need a covering selected pathway
  for (int j = 0; j < p; ++j) {
    if (!state.gamma[j]) continue;
    bool covered = false;
    for (int k : membership.pathways_of_gene[j]) {
      if (state.theta[k]) {
        covered = true;
        break;
      }
    }
    if (!covered) report.violations.push_back({ViolationKind::orphan_gene, {j}});
  }

  report.valid = report.violations.empty();
  return report;
}

double theta_log_prior(const BinaryVector& theta, double phi_star) {
  const double log_phi = std::log(phi_star);
  const double log_1m = std::log1p(-phi_star);
  double out = 0.0;
  for (auto t : theta) out += t ? log_phi : log_1m;
  return out;
}

double mrf_log_unnormalized(const BinaryVector& gamma, const GeneNetwork& network,
                            double mu, double eta) {
  return mu * popcount(gamma) + eta * mrf_quad_form(gamma, network);
}

double mrf_conditional(const BinaryVector& gamma, int j, const GeneNetwork& network,
                       double mu, double eta) {
  int selected_neighbors = 0;
  for (int i : network.neighbors[j]) selected_neighbors += gamma[i];
  // Flipping gamma_j changes the quadratic form by 2 eta s_j (the symmetric
  // adjacency counts each incident selected edge twice).
  return logistic(mu + 2.0 * eta * selected_neighbors);
}

double joint_log_prior_active(const ModelState& state, const PathwayMembership& membership,
                              const GeneNetwork& active, const Hyperparameters& hp) {
  if (!check_validity(membership, state).valid) return kNegInf;
  return theta_log_prior(state.theta, hp.phi_star) +
         mrf_log_unnormalized(state.gamma, active, hp.mu_mrf, state.eta);
}

double joint_log_prior(const ModelState& state, const PathwayMembership& membership,
                       const GeneNetwork& network, const Hyperparameters& hp, EdgeRule rule) {
  if (!check_validity(membership, state).valid) return kNegInf;
  const GeneNetwork active = active_adjacency(network, membership, state.theta, rule);
  return joint_log_prior_active(state, membership, active, hp);
}

double eta_log_prior(double eta, const Hyperparameters& hp) {
  if (eta < 0 || eta > hp.eta_pt) return kNegInf;
  const double x = eta / hp.eta_pt;
  // Beta(c0, d0) on [0,1] mapped to [0, eta_pt] (the -log eta_pt term is the
  // Jacobian).  Exact endpoints take the density's limit: (c0-1)log(0) is
  // -inf for c0 > 1 and +inf for c0 < 1; same for d0 at the right edge.
  const double log_x = (hp.c0 == 1.0) ? 0.0 : (hp.c0 - 1.0) * std::log(x);
  const double log_1mx = (hp.d0 == 1.0) ? 0.0 : (hp.d0 - 1.0) * std::log1p(-x);
  const double log_beta_fn = log_gamma(hp.c0) + log_gamma(hp.d0) - log_gamma(hp.c0 + hp.d0);
  return log_x + log_1mx - log_beta_fn - std::log(hp.eta_pt);
}

}  // namespace pathsel
