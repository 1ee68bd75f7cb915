#pragma once

#include "pathsel/common.hpp"
#include "pathsel/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace pathsel {

// One systematic-scan Gibbs sweep (j = 0..p-1) over the MRF
//   p(gamma) ∝ exp(mu sum(gamma) + eta gamma' R gamma),  eta >= 0.
void gibbs_sweep(BinaryVector& gamma, const GeneNetwork& network, double mu, double eta, Rng& rng);

struct CftpSettings {
  std::uint64_t t_max = std::uint64_t{1} << 20;  // cap on sweeps from the past
  bool check_monotone = false;  // assert the sandwich invariant each sweep
};

// Perfect sample from the MRF via monotone coupling from the past.  The upper
// chain starts all-ones, the lower all-zeros, both driven by identical
// per-node uniforms; for eta >= 0 the update is monotone, so when the chains
// meet at time 0 the common value is an exact draw.  The start time doubles
// (1, 2, 4, ...) reusing the same randomness for each time slot, as required
// for correctness.  Throws CftpError("CFTP failed to coalesce") beyond t_max.
BinaryVector cftp_perfect_sample(const GeneNetwork& network, double mu, double eta, Rng& rng,
                                 const CftpSettings& settings = {});

// Gibbs-based scan of E[sum(gamma)] over a grid of eta values, used to locate
// the phase transition empirically.  Each grid point runs `sweeps` sweeps
// (first quarter discarded as burn-in, warm-started from the previous point).
// eta_pt_estimate is the grid point with the largest forward difference in
// the mean, left unset when that jump is within twice the typical Monte Carlo
// noise of the differences (no detectable transition on this grid).
struct GridScanResult {
  std::vector<double> grid;
  std::vector<double> mean_selected;
  std::vector<double> std_error;  // batch-means standard error per grid point
  std::optional<double> eta_pt_estimate;
};

GridScanResult phase_transition_scan(const GeneNetwork& network, double mu,
                                     const std::vector<double>& grid, int sweeps, Rng& rng);

// CSV export: "eta,mean_selected,std_error" rows plus a trailing comment line
// with the estimate (if any).
void write_grid_scan_csv(const GridScanResult& result, std::ostream& out);

}  // namespace pathsel
