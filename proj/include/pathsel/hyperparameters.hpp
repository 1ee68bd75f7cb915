#pragma once

#include <stdexcept>

namespace pathsel {

// Fixed hyperparameters of the model.  Defaults reproduce the simulation
// protocol: a vague intercept (h0 large), unit-information scaled inverse
// chi-square style variance prior with nu0 * sigma0_sq / 2 = 0.5, weakly
// informative slab scale h, sparse pathway inclusion phi_star, sparse gene
// baseline mu_mrf, and a Beta(c0, d0) prior for the network smoothing
// parameter eta rescaled to [0, eta_pt].
struct Hyperparameters {
  double alpha0 = 0.0;         // prior mean of the intercept
  double beta0 = 0.0;          // prior mean of each score coefficient
  double h0 = 1e6;             // prior relative variance of the intercept
  double h = 0.02;             // prior relative variance of each coefficient
  double nu0 = 6.0;            // df of the marginalized variance prior
  double sigma0_sq = 1.0 / 6;  // scale of the marginalized variance prior
  double phi_star = 0.01;      // prior inclusion probability of a pathway
  double mu_mrf = -3.5;        // MRF sparsity offset for gene inclusion
  double c0 = 5.0;             // Beta shape 1 for eta / eta_pt
  double d0 = 2.0;             // Beta shape 2 for eta / eta_pt
  double eta_pt = 0.092;       // phase-transition bound: eta in [0, eta_pt]

  void validate() const {
    if (!(h0 > 0) || !(h > 0)) throw std::invalid_argument("h0 and h must be positive");
    if (!(nu0 > 0) || !(sigma0_sq > 0)) throw std::invalid_argument("nu0 and sigma0_sq must be positive");
    if (!(phi_star > 0) || !(phi_star < 1)) throw std::invalid_argument("phi_star must lie in (0,1)");
    if (!(c0 > 0) || !(d0 > 0)) throw std::invalid_argument("c0 and d0 must be positive");
    if (!(eta_pt > 0)) throw std::invalid_argument("eta_pt must be positive");
  }
};

// Prior pathway inclusion probability implied by a spike-and-Beta mixture on
// the per-pathway inclusion frequency: with probability rho the frequency is
// pinned at zero and otherwise drawn from Beta(a0, b0); integrating it out
// leaves independent Bernoulli(phi_star) indicators with
// phi_star = a0 (1 - rho) / (a0 + b0).
inline double phi_star_from(double a0, double b0, double rho) {
  if (!(a0 > 0) || !(b0 > 0)) throw std::invalid_argument("a0 and b0 must be positive");
  if (!(rho >= 0) || !(rho < 1)) throw std::invalid_argument("rho must lie in [0,1)");
  return a0 * (1.0 - rho) / (a0 + b0);
}

}  // namespace pathsel
