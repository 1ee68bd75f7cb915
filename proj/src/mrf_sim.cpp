#include "pathsel/mrf_sim.hpp"

#include "pathsel/priors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

namespace pathsel {

namespace {

// Conditional selection probabilities depend on gamma only through the number
// of selected neighbors, so one table per (mu, eta, max degree) serves every
// node update in a sweep.
std::vector<double> conditional_table(const GeneNetwork& network, double mu, double eta) {
  std::size_t max_degree = 0;
  for (const auto& nb : network.neighbors) max_degree = std::max(max_degree, nb.size());
  std::vector<double> table(max_degree + 1);
  for (std::size_t s = 0; s <= max_degree; ++s)
    table[s] = logistic(mu + 2.0 * eta * static_cast<double>(s));
  return table;
}

int selected_neighbors(const BinaryVector& gamma, const GeneNetwork& network, int j) {
  int s = 0;
  for (int i : network.neighbors[j]) s += gamma[i];
  return s;
}

}  // namespace

void gibbs_sweep(BinaryVector& gamma, const GeneNetwork& network, double mu, double eta,
                 Rng& rng) {
  const auto table = conditional_table(network, mu, eta);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = 0; j < network.n_genes; ++j)
    gamma[j] = unif(rng) < table[static_cast<std::size_t>(selected_neighbors(gamma, network, j))];
}

BinaryVector cftp_perfect_sample(const GeneNetwork& network, double mu, double eta, Rng& rng,
                                 const CftpSettings& settings) {
  if (eta < 0) throw std::invalid_argument("cftp requires eta >= 0 (monotone updates)");
  const int p = network.n_genes;
  const auto table = conditional_table(network, mu, eta);

  // Randomness for the sweep at time -t is generated from its own engine
  // seeded by sweep_seeds[t-1]; seeds are drawn from the caller's rng on
  // first use and cached, so when the start time doubles every time slot
  // reuses exactly the randomness it had in earlier attempts.
  std::vector<std::uint64_t> sweep_seeds;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  BinaryVector upper(static_cast<std::size_t>(p)), lower(static_cast<std::size_t>(p));
  for (std::uint64_t t_start = 1;; t_start *= 2) {
    if (t_start > settings.t_max) throw CftpError("CFTP failed to coalesce");
    while (sweep_seeds.size() < t_start) sweep_seeds.push_back(rng());

    std::fill(upper.begin(), upper.end(), std::uint8_t{1});
    std::fill(lower.begin(), lower.end(), std::uint8_t{0});

    for (std::uint64_t t = t_start; t >= 1; --t) {
      Rng sweep_rng(sweep_seeds[static_cast<std::size_t>(t - 1)]);
      for (int j = 0; j < p; ++j) {
        // One shared uniform per node drives both chains: since the
        // conditional probability is nondecreasing in the neighbor
        // configuration (eta >= 0), the order lower <= upper is preserved.
        const double u = unif(sweep_rng);
        upper[j] = u < table[static_cast<std::size_t>(selected_neighbors(upper, network, j))];
        lower[j] = u < table[static_cast<std::size_t>(selected_neighbors(lower, network, j))];
        if (settings.check_monotone) assert(lower[j] <= upper[j]);
      }
      if (settings.check_monotone)
        for (int j = 0; j < p; ++j) assert(lower[j] <= upper[j]);
    }
    if (upper == lower) return upper;
  }
}

GridScanResult phase_transition_scan(const GeneNetwork& network, double mu,
                                     const std::vector<double>& grid, int sweeps, Rng& rng) {
  if (grid.size() < 2) throw std::invalid_argument("phase scan needs at least two grid points");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("phase scan grid must be increasing");
  if (sweeps < 8) throw std::invalid_argument("phase scan needs at least 8 sweeps per point");

  GridScanResult result;
  result.grid = grid;

  BinaryVector gamma(static_cast<std::size_t>(network.n_genes), 0);  // warm start across grid
  const int burn = sweeps / 4;
  for (double eta : grid) {
    std::vector<double> counts;
    counts.reserve(static_cast<std::size_t>(sweeps - burn));
    for (int s = 0; s < sweeps; ++s) {
      gibbs_sweep(gamma, network, mu, eta, rng);
      if (s >= burn) counts.push_back(static_cast<double>(popcount(gamma)));
    }
    const double n = static_cast<double>(counts.size());
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= n;

    // batch-means standard error (~sqrt(n) batches) to absorb autocorrelation
    const int n_batches = std::max(2, static_cast<int>(std::sqrt(n)));
    const int batch_len = static_cast<int>(counts.size()) / n_batches;
    double var_bm = 0.0;
    for (int b = 0; b < n_batches; ++b) {
      double bm = 0.0;
      for (int i = b * batch_len; i < (b + 1) * batch_len; ++i) bm += counts[static_cast<std::size_t>(i)];
      bm /= batch_len;
      var_bm += (bm - mean) * (bm - mean);
    }
    var_bm /= (n_batches - 1);
    result.mean_selected.push_back(mean);
    result.std_error.push_back(std::sqrt(var_bm / n_batches));
  }

  // Largest forward difference marks the candidate transition; report it only
  // when it stands clear of the Monte Carlo noise.  The baseline is the noise
  // of the LARGEST of m differences under the no-transition null: a typical
  // per-difference standard error inflated by the Gaussian extreme-value
  // factor sqrt(2 ln m), so flat scans do not trip the detector just because
  // one of many noisy differences happens to be big.
  std::vector<double> diffs, diff_se;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    diffs.push_back(result.mean_selected[i + 1] - result.mean_selected[i]);
    diff_se.push_back(std::hypot(result.std_error[i + 1], result.std_error[i]));
  }
  std::size_t imax = 0;
  for (std::size_t i = 1; i < diffs.size(); ++i)
    if (diffs[i] > diffs[imax]) imax = i;

  std::vector<double> se_sorted = diff_se;
  std::nth_element(se_sorted.begin(), se_sorted.begin() + se_sorted.size() / 2, se_sorted.end());
  const double typical_se = se_sorted[se_sorted.size() / 2];
  const double m = static_cast<double>(diffs.size());
  const double max_noise = typical_se * std::sqrt(2.0 * std::log(std::max(m, 2.0)));
  if (diffs[imax] >= 2.0 * max_noise && diffs[imax] > 0)
    result.eta_pt_estimate = grid[imax];
  return result;
}

void write_grid_scan_csv(const GridScanResult& result, std::ostream& out) {
  out << "eta,mean_selected,std_error\n";
  char buf[128];
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", result.grid[i],
                  result.mean_selected[i], result.std_error[i]);
    out << buf;
  }
  if (result.eta_pt_estimate)
    out << "# eta_pt_estimate," << *result.eta_pt_estimate << "\n";
  else
    out << "# eta_pt_estimate,none\n";
}

}  // namespace pathsel
