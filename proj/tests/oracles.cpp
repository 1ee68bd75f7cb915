#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oracle {

namespace {

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return -std::numeric_limits<double>::infinity();
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) -
         std::lgamma(a) - std::lgamma(b);
}

}  // namespace

double mvt_log_density(const Vector& y, const Vector& location, const Matrix& scale, double df) {
  const int n = static_cast<int>(y.size());
  Eigen::FullPivLU<Matrix> lu(scale);
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += std::log(std::abs(lu.matrixLU()(i, i)));
  const Matrix inv = lu.inverse();
  const Vector r = y - location;
  const double q = r.dot(inv * r);
  return std::lgamma((df + n) / 2.0) - std::lgamma(df / 2.0) -
         (n / 2.0) * std::log(df * M_PI) - 0.5 * log_det -
         ((df + n) / 2.0) * std::log1p(q / df);
}

double marginal_log_likelihood(const Vector& y, const Matrix& scores, const Hyperparameters& hp) {
  const int n = static_cast<int>(y.size());
  const Vector ones = Vector::Ones(n);
  const Vector location =
      hp.alpha0 * ones + (scores.cols() > 0 ? Vector(hp.beta0 * scores.rowwise().sum()) : Vector(Vector::Zero(n)));
  Matrix scale = Matrix::Identity(n, n) + hp.h0 * ones * ones.transpose();
  if (scores.cols() > 0) scale += hp.h * scores * scores.transpose();
  scale *= hp.sigma0_sq;
  return mvt_log_density(y, location, scale, hp.nu0);
}

Vector pls_scores(const Matrix& x_centered, const Vector& y) {
  const int n = static_cast<int>(x_centered.rows());
  const Vector yc = y.array() - y.mean();
  Vector c = x_centered.transpose() * yc / (n - 1);
  const double norm = c.norm();
  if (norm == 0.0) return Vector::Zero(n);
  c /= norm;
  return x_centered * c;
}

Matrix build_scores(const Matrix& expression_centered, const Vector& y,
                    const PathwayMembership& membership, std::uint32_t theta_mask,
                    std::uint64_t gamma_mask) {
  const int n = static_cast<int>(expression_centered.rows());
  std::vector<Vector> cols;
  for (int k = 0; k < membership.n_pathways; ++k) {
    if (!((theta_mask >> k) & 1)) continue;
    std::vector<int> genes;
    for (int j : membership.genes_in_pathway[k])
      if ((gamma_mask >> j) & 1) genes.push_back(j);
    if (genes.empty()) throw std::logic_error("build_scores: selected pathway with no genes");
    Matrix sub(n, static_cast<int>(genes.size()));
    for (std::size_t g = 0; g < genes.size(); ++g) sub.col(static_cast<int>(g)) = expression_centered.col(genes[g]);
    cols.push_back(pls_scores(sub, y));
  }
  Matrix t(n, static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) t.col(static_cast<int>(c)) = cols[c];
  return t;
}

bool is_valid(const PathwayMembership& membership, std::uint32_t theta_mask,
              std::uint64_t gamma_mask) {
  std::vector<std::uint64_t> subsets;
  std::uint64_t covered = 0;
  for (int k = 0; k < membership.n_pathways; ++k) {
    if (!((theta_mask >> k) & 1)) continue;
    std::uint64_t subset = 0;
    for (int j : membership.genes_in_pathway[k])
      if ((gamma_mask >> j) & 1) subset |= std::uint64_t{1} << j;
    if (subset == 0) return false;  // selected pathway without a selected gene
    subsets.push_back(subset);
    covered |= subset;
  }
  if ((gamma_mask & ~covered) != 0) return false;  // orphan gene
  std::sort(subsets.begin(), subsets.end());
  for (std::size_t i = 1; i < subsets.size(); ++i)
    if (subsets[i] == subsets[i - 1]) return false;  // duplicate subset
  return true;
}

double quad_form(std::uint64_t gamma_mask, const GeneNetwork& network) {
  double q = 0.0;
  for (int i = 0; i < network.n_genes; ++i) {
    if (!((gamma_mask >> i) & 1)) continue;
    for (int j : network.neighbors[i])
      if ((gamma_mask >> j) & 1) q += 1.0;  // counts both (i,j) and (j,i)
  }
  return q;
}

MrfEnumeration enumerate_mrf(const GeneNetwork& network, double mu, double eta) {
  const int p = network.n_genes;
  if (p > 24) throw std::logic_error("enumerate_mrf: p too large");
  const std::uint64_t n_masks = std::uint64_t{1} << p;
  std::vector<double> log_w(n_masks);
  for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
    const int ones = std::popcount(mask);
    log_w[mask] = mu * ones + eta * quad_form(mask, network);
  }
  const double log_z = log_sum_exp(log_w);
  MrfEnumeration out;
  out.probability.resize(n_masks);
  for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
    out.probability[mask] = std::exp(log_w[mask] - log_z);
    out.mean_selected += out.probability[mask] * std::popcount(mask);
  }
  return out;
}

JointEnumeration enumerate_joint(const Matrix& expression_centered, const Vector& y,
                                 const PathwayMembership& membership, const GeneNetwork& network,
                                 const Hyperparameters& hp, double eta, bool shared_pathway_rule) {
  const int k_count = membership.n_pathways;
  const int p = membership.n_genes;
  if (k_count > 8 || p > 16) throw std::logic_error("enumerate_joint: instance too large");

  JointEnumeration out;
  std::vector<double> log_w;
  for (std::uint32_t theta = 0; theta < (std::uint32_t{1} << k_count); ++theta) {
    // theta-restricted adjacency as an explicit active-pair predicate
    std::uint64_t covered = 0;
    for (int k = 0; k < k_count; ++k)
      if ((theta >> k) & 1)
        for (int j : membership.genes_in_pathway[k]) covered |= std::uint64_t{1} << j;
    const auto edge_active = [&](int a, int b) {
      if (shared_pathway_rule) {
        for (int k = 0; k < k_count; ++k)
          if (((theta >> k) & 1) && membership.contains(k, a) && membership.contains(k, b))
            return true;
        return false;
      }
      return ((covered >> a) & 1) != 0 && ((covered >> b) & 1) != 0;
    };

    for (std::uint64_t gamma = 0; gamma < (std::uint64_t{1} << p); ++gamma) {
      if (!is_valid(membership, theta, gamma)) continue;
      double quad = 0.0;
      for (int a = 0; a < p; ++a) {
        if (!((gamma >> a) & 1)) continue;
        for (int b : network.neighbors[a])
          if (((gamma >> b) & 1) && edge_active(a, b)) quad += 1.0;
      }
      const int k_sel = std::popcount(theta);
      const double log_prior = k_sel * std::log(hp.phi_star) +
                               (k_count - k_sel) * std::log1p(-hp.phi_star) +
                               hp.mu_mrf * std::popcount(gamma) + eta * quad;
      const Matrix scores = build_scores(expression_centered, y, membership, theta, gamma);
      const double log_lik = marginal_log_likelihood(y, scores, hp);
      out.keys.push_back((std::uint64_t{theta} << 48) | gamma);
      log_w.push_back(log_prior + log_lik);
    }
  }
  const double log_z = log_sum_exp(log_w);
  out.probability.resize(log_w.size());
  for (std::size_t i = 0; i < log_w.size(); ++i) out.probability[i] = std::exp(log_w[i] - log_z);
  return out;
}

std::vector<double> eta_posterior_bins(const BinaryVector& gamma, const GeneNetwork& active,
                                       const Hyperparameters& hp, int n_bins, int quad_per_bin) {
  const int p = active.n_genes;
  if (p > 20) throw std::logic_error("eta_posterior_bins: p too large");
  std::uint64_t gamma_mask = 0;
  for (int j = 0; j < p; ++j)
    if (gamma[static_cast<std::size_t>(j)]) gamma_mask |= std::uint64_t{1} << j;
  const double g_quad = quad_form(gamma_mask, active);

  // precompute per-mask counts for Z(eta)
  const std::uint64_t n_masks = std::uint64_t{1} << p;
  std::vector<double> mask_ones(n_masks), mask_quad(n_masks);
  for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
    mask_ones[mask] = std::popcount(mask);
    mask_quad[mask] = quad_form(mask, active);
  }
  const auto log_density = [&](double eta) {
    std::vector<double> terms(n_masks);
    for (std::uint64_t mask = 0; mask < n_masks; ++mask)
      terms[mask] = hp.mu_mrf * mask_ones[mask] + eta * mask_quad[mask];
    const double log_z = log_sum_exp(terms);
    return eta * g_quad - log_z + log_beta_pdf(eta / hp.eta_pt, hp.c0, hp.d0);
  };

  // composite trapezoid within each bin
  std::vector<double> mass(static_cast<std::size_t>(n_bins), 0.0);
  const double width = hp.eta_pt / n_bins;
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> log_vals(static_cast<std::size_t>(n_bins));
  for (int b = 0; b < n_bins; ++b) {
    log_vals[static_cast<std::size_t>(b)].resize(static_cast<std::size_t>(quad_per_bin) + 1);
    for (int q = 0; q <= quad_per_bin; ++q) {
      const double eta = width * (b + static_cast<double>(q) / quad_per_bin);
      const double lv = log_density(std::min(std::max(eta, 1e-12), hp.eta_pt - 1e-12));
      log_vals[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)] = lv;
      max_log = std::max(max_log, lv);
    }
  }
  double total = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    double s = 0.0;
    for (int q = 0; q <= quad_per_bin; ++q) {
      const double w = (q == 0 || q == quad_per_bin) ? 0.5 : 1.0;
      s += w * std::exp(log_vals[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)] - max_log);
    }
    mass[static_cast<std::size_t>(b)] = s;
    total += s;
  }
  for (double& m : mass) m /= total;
  return mass;
}

double TruncatedConditional::cdf_at(double q) const {
  if (q <= x.front()) return 0.0;
  if (q >= x.back()) return 1.0;
  const auto it = std::upper_bound(x.begin(), x.end(), q);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double t = (q - x[i - 1]) / (x[i] - x[i - 1]);
  return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
}

TruncatedConditional censored_conditional_cdf(const Vector& z, int index, double lower,
                                              const Vector& location, const Matrix& scale,
                                              double df, double upper, int points) {
  TruncatedConditional out;
  out.x = linspace(lower, upper, points);
  std::vector<double> log_f(out.x.size());
  Vector probe = z;
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    probe[index] = out.x[i];
    log_f[i] = mvt_log_density(probe, location, scale, df);
  }
  const double m = *std::max_element(log_f.begin(), log_f.end());
  out.cdf.assign(out.x.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < out.x.size(); ++i) {
    const double step = out.x[i] - out.x[i - 1];
    acc += 0.5 * step * (std::exp(log_f[i] - m) + std::exp(log_f[i - 1] - m));
    out.cdf[i] = acc;
  }
  for (double& c : out.cdf) c /= acc;
  return out;
}

double reflected_normal_density(double from, double to, double sd, double length, int images) {
  const auto phi = [sd](double d) {
    return std::exp(-0.5 * d * d / (sd * sd)) / (sd * std::sqrt(2.0 * M_PI));
  };
  double density = 0.0;
  for (int k = -images; k <= images; ++k) {
    density += phi(to + 2.0 * k * length - from);
    density += phi(-to + 2.0 * k * length - from);
  }
  return density;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::logic_error("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw std::logic_error("pearson: size mismatch");
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    sa += (a[i] - ma) * (a[i] - ma);
    sb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(sa * sb);
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return grid;
}

}  // namespace oracle
