// Statistical acceptance suite: end-to-end checks of the sampler stack
// against exhaustive enumeration, quadrature, and closed-form oracles.  Each
// criterion prints one PASS/FAIL line with its measured statistics; the
// process exits nonzero if any criterion fails.  All randomness is seeded, so
// a pass is reproducible.

#include "pathsel/common.hpp"
#include "pathsel/dataset.hpp"
#include "pathsel/hyperparameters.hpp"
#include "pathsel/inference.hpp"
#include "pathsel/likelihood.hpp"
#include "pathsel/membership.hpp"
#include "pathsel/model_state.hpp"
#include "pathsel/mrf_sim.hpp"
#include "pathsel/network.hpp"
#include "pathsel/priors.hpp"
#include "pathsel/sampler.hpp"
#include "pathsel/scores.hpp"
#include "pathsel/simgen.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

using namespace pathsel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

std::vector<std::string> sample_ids(int n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids.push_back("S" + std::to_string(i));
  return ids;
}

Matrix random_raw_expression(Rng& rng, int n, int p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = normal(rng);
  return x;
}

// ---------------------------------------------------------------------------
// criterion 1: the marginalized t likelihood matches its direct definition
// ---------------------------------------------------------------------------
// 100 random instances (n in [5, 30], K in [0, 5], varied hyperparameters);
// both evaluation paths must agree with an oracle that assembles the full
// n x n scale matrix and inverts it explicitly.  Tolerance 1e-8 absolute.

Outcome criterion_likelihood() {
  Rng rng = make_rng(4001, 0);
  std::uniform_int_distribution<int> n_dist(5, 30);
  std::uniform_int_distribution<int> k_dist(0, 5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = n_dist(rng);
    const int k = k_dist(rng);
    Matrix scores(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) scores(i, j) = normal(rng);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = 0.4 * normal(rng) + (k > 0 ? 0.5 * scores(i, 0) : 0.0);

    Hyperparameters hp;
    hp.h0 = (rep % 2 == 0) ? 1e6 : 50.0;
    hp.alpha0 = 2.0 * unif(rng) - 1.0;
    hp.beta0 = 2.0 * unif(rng) - 1.0;
    hp.nu0 = 3.0 + 9.0 * unif(rng);
    hp.sigma0_sq = 0.05 + 1.5 * unif(rng);
    hp.h = 0.02 + 0.4 * unif(rng);

    const double ref = oracle::marginal_log_likelihood(y, scores, hp);
    for (auto path : {LikelihoodPath::dense, LikelihoodPath::lowrank}) {
      const double got = marginal_log_likelihood(y, scores, hp, path);
      worst = std::max(worst, std::abs(got - ref));
    }
  }
  return {worst < 1e-8, "max |log-likelihood difference| = " + fmt("%.3g", worst) +
                            " over 100 instances x {dense, lowrank} (tolerance 1e-8)"};
}

// ---------------------------------------------------------------------------
// criterion 2: perfect simulation draws exactly from the MRF
// ---------------------------------------------------------------------------
// Five random 8-node graphs at mu = -3.5.  Per graph, the interaction scale
// of the steepest rise of E[#selected] is located by exhaustive enumeration
// on an eta grid; 20000 coupling-from-the-past draws at half that value must
// match the enumerated distribution over all 256 configurations within total
// variation 0.02, with the monotone sandwich invariant asserted every sweep.

Outcome criterion_cftp() {
  const double mu = -3.5;
  double worst_tv = 0.0;
  std::string detail;
  for (int g = 0; g < 5; ++g) {
    Rng rng = make_rng(4100 + g, 0);
    const GeneNetwork net = testutil::random_network(rng, 8, 0.35);

    const auto grid = oracle::linspace(0.0, 2.5, 26);
    double best_jump = -1.0, eta_pt = grid[1];
    double prev = oracle::enumerate_mrf(net, mu, grid[0]).mean_selected;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double mean = oracle::enumerate_mrf(net, mu, grid[i]).mean_selected;
      if (mean - prev > best_jump) {
        best_jump = mean - prev;
        eta_pt = grid[i];
      }
      prev = mean;
    }

    const double eta = 0.5 * eta_pt;
    const auto exact = oracle::enumerate_mrf(net, mu, eta);
    const int n_draws = 20000;
    std::vector<double> empirical(exact.probability.size(), 0.0);
    CftpSettings cftp;
    cftp.check_monotone = true;
    for (int rep = 0; rep < n_draws; ++rep) {
      const BinaryVector draw = cftp_perfect_sample(net, mu, eta, rng, cftp);
      empirical[testutil::mask_of(draw)] += 1.0 / n_draws;
    }
    const double tv = oracle::total_variation(empirical, exact.probability);
    worst_tv = std::max(worst_tv, tv);
    if (!detail.empty()) detail += ", ";
    detail += "graph " + std::to_string(g) + ": eta=" + fmt("%.3f", eta) + " tv=" +
              fmt("%.4f", tv);
  }
  return {worst_tv < 0.02, detail + " (tolerance 0.02)"};
}

// ---------------------------------------------------------------------------
// criterion 3: at fixed eta the chain targets the exact joint law
// ---------------------------------------------------------------------------
// Two overlapping pathways over six genes, n = 30: the stationary
// distribution over all valid (theta, gamma) configurations is enumerable.
// Empirical visit frequencies of a 300k-iteration chain (eta frozen) must be
// within total variation 0.05 of the enumeration; any visit to a state
// outside the enumerated (valid) support counts fully against the distance.

Outcome criterion_joint_law() {
  const auto membership = make_membership({{"PW0", "G0"},
                                           {"PW0", "G1"},
                                           {"PW0", "G2"},
                                           {"PW0", "G3"},
                                           {"PW1", "G2"},
                                           {"PW1", "G3"},
                                           {"PW1", "G4"},
                                           {"PW1", "G5"}});
  const auto network =
      make_network(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 3}, {2, 4}});

  const int n = 30;
  Rng rng = make_rng(4200, 0);
  const Matrix raw = random_raw_expression(rng, n, 6);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(n);
  for (int i = 0; i < n; ++i)
    y[i] = 1.0 * raw(i, 0) + 0.8 * raw(i, 1) - 0.9 * raw(i, 4) + 0.7 * normal(rng);
  const Dataset data = make_dataset(sample_ids(n), raw, y, {}, OutcomeKind::continuous);

  Hyperparameters hp;
  hp.phi_star = 0.2;  // spread the prior so many states carry visible mass
  hp.mu_mrf = -1.5;
  hp.h = 0.1;
  const double eta = 0.05;

  RunSettings settings;
  settings.iterations = 300000;
  settings.burn_in = 20000;
  settings.eta_update_every = 0;
  settings.eta_init = eta;
  settings.init_pathways = 1;
  settings.seed = 4201;
  const ChainTrace trace = run_chain(data, membership, network, hp, settings);

  const auto enumeration =
      oracle::enumerate_joint(data.expression, data.response, membership, network, hp, eta,
                              /*shared_pathway_rule=*/false);
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < enumeration.keys.size(); ++i) index[enumeration.keys[i]] = i;

  std::vector<double> empirical(enumeration.keys.size(), 0.0);
  double invalid_mass = 0.0;
  std::int64_t kept = 0;
  for (std::int64_t r = 0; r < trace.n_records(); ++r)
    if (trace.is_post_burn_in(r)) ++kept;
  for (std::int64_t r = 0; r < trace.n_records(); ++r) {
    if (!trace.is_post_burn_in(r)) continue;
    const std::uint64_t key = (testutil::mask_of(trace.theta_at(r)) << 48) |
                              testutil::mask_of(trace.gamma_at(r));
    const auto it = index.find(key);
    if (it == index.end())
      invalid_mass += 1.0 / kept;
    else
      empirical[it->second] += 1.0 / kept;
  }

  double tv = invalid_mass;
  for (std::size_t i = 0; i < empirical.size(); ++i)
    tv += 0.5 * std::abs(empirical[i] - enumeration.probability[i]);

  return {tv < 0.05 && invalid_mass == 0.0,
          "tv = " + fmt("%.4f", tv) + " over " + std::to_string(enumeration.keys.size()) +
              " valid states, off-support mass = " + fmt("%.3g", invalid_mass) +
              " (tolerance 0.05)"};
}

// ---------------------------------------------------------------------------
// criterion 4: the exchange step recovers the exact eta posterior
// ---------------------------------------------------------------------------
// Fixed gamma on a fixed 8-node adjacency: p(eta | gamma) is computable by
// quadrature with an enumerated normalizing constant.  A histogram of 800k
// exchange updates must match the 50-bin quadrature within total variation
// 0.05.

Outcome criterion_eta_posterior() {
  const auto net = make_network(
      8, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {0, 4}, {2, 6}});
  const BinaryVector gamma = testutil::bits_of(0b11001111u, 8);  // quad form > 0

  Hyperparameters hp;
  ModelState state;
  state.theta = {1};
  state.gamma = gamma;
  state.eta = 0.5 * hp.eta_pt;

  EtaAuxiliary aux;
  CftpSettings cftp;
  Rng rng = make_rng(4300, 0);

  const int n_bins = 50;
  const std::int64_t total = 800000, burn = 20000;
  std::vector<double> empirical(n_bins, 0.0);
  for (std::int64_t it = 0; it < total; ++it) {
    update_eta(state, net, hp, 0.25 * hp.eta_pt, cftp, aux, rng);
    if (it < burn) continue;
    int bin = static_cast<int>(state.eta / hp.eta_pt * n_bins);
    bin = std::min(bin, n_bins - 1);
    empirical[static_cast<std::size_t>(bin)] += 1.0 / static_cast<double>(total - burn);
  }

  const auto exact = oracle::eta_posterior_bins(gamma, net, hp, n_bins, 64);
  const double tv = oracle::total_variation(empirical, exact);
  const double accept_rate =
      static_cast<double>(aux.accepts) / static_cast<double>(aux.proposals);
  return {tv < 0.05 && aux.cftp_failures == 0,
          "tv = " + fmt("%.4f", tv) + " over 50 bins, eta accept rate = " +
              fmt("%.2f", accept_rate) + ", cftp failures = " +
              std::to_string(aux.cftp_failures) + " (tolerance 0.05)"};
}

// ---------------------------------------------------------------------------
// criterion 5: end-to-end recovery on synthetic data
// ---------------------------------------------------------------------------
// Five replicates of the reference protocol (20 pathways of 10-20 genes with
// overlap, n = 100, four outcome-related pathways, |beta| = 1.5): at least 4
// of 5 must rank every true pathway above every false one AND, at the 0.5
// thresholds, recover at least half the true genes with no false gene.  The
// mean separation between the lowest true and highest false marginal must be
// at least 0.15.

struct Replicate {
  bool ok = false;
  bool failed_to_run = false;
  double gap = 0.0;
  int n_true = 0, recovered = 0, false_genes = 0;
  std::string error;
};

Replicate run_recovery_replicate(int r) {
  Replicate rep;
  try {
    Rng rng = make_rng(5000 + r, 0);
    StructureConfig sc;  // 20 pathways of 10..20 genes, 0.15 overlap
    const auto [membership, network] = random_structure(sc, rng);

    SimConfig cfg;
    cfg.n_samples = 100;
    cfg.n_true_pathways = 4;
    cfg.beta_magnitude = 1.5;
    cfg.rho = 0.7;
    cfg.noise_sd = 1.0;
    const SimTruth truth = select_truth(membership, network, cfg, rng);
    const SimData sim = generate(membership, network, truth, cfg, rng);
    const Dataset data =
        make_dataset(sample_ids(cfg.n_samples), sim.expression, sim.response, {},
                     OutcomeKind::continuous);

    Hyperparameters hp;
    RunSettings settings;
    settings.iterations = 150000;
    settings.burn_in = 25000;
    settings.eta_update_every = 4;
    settings.seed = 6000 + static_cast<std::uint64_t>(r);
    const ChainTrace trace = run_chain(data, membership, network, hp, settings);
    const std::vector<ChainTrace> traces{trace};

    const Vector marginals = pathway_marginals(traces);
    std::vector<char> is_true(static_cast<std::size_t>(membership.n_pathways), 0);
    for (int k : truth.true_pathways) is_true[static_cast<std::size_t>(k)] = 1;
    double min_true = 1.0, max_false = 0.0;
    for (int k = 0; k < membership.n_pathways; ++k) {
      if (is_true[static_cast<std::size_t>(k)])
        min_true = std::min(min_true, marginals[k]);
      else
        max_false = std::max(max_false, marginals[k]);
    }
    rep.gap = min_true - max_false;

    const Selection sel = threshold_selection(traces, membership, 0.5, 0.5);
    std::vector<char> true_gene(static_cast<std::size_t>(membership.n_genes), 0);
    for (int j : truth.true_genes) true_gene[static_cast<std::size_t>(j)] = 1;
    rep.n_true = static_cast<int>(truth.true_genes.size());
    for (int j = 0; j < membership.n_genes; ++j) {
      if (!sel.gamma[static_cast<std::size_t>(j)]) continue;
      if (true_gene[static_cast<std::size_t>(j)])
        ++rep.recovered;
      else
        ++rep.false_genes;
    }
    rep.ok = rep.gap > 0.0 && 2 * rep.recovered >= rep.n_true && rep.false_genes == 0;
  } catch (const std::exception& e) {
    rep.failed_to_run = true;
    rep.error = e.what();
  }
  return rep;
}

Outcome criterion_recovery() {
  const int n_replicates = 5;
  std::vector<Replicate> reps(n_replicates);
  std::vector<std::thread> workers;
  workers.reserve(n_replicates);
  for (int r = 0; r < n_replicates; ++r)
    workers.emplace_back([&reps, r] { reps[static_cast<std::size_t>(r)] = run_recovery_replicate(r); });
  for (auto& w : workers) w.join();

  int n_pass = 0;
  double gap_sum = 0.0;
  std::string detail;
  for (int r = 0; r < n_replicates; ++r) {
    const Replicate& rep = reps[static_cast<std::size_t>(r)];
    if (rep.failed_to_run) return {false, "replicate " + std::to_string(r) + " threw: " + rep.error};
    n_pass += rep.ok;
    gap_sum += rep.gap;
    if (!detail.empty()) detail += ", ";
    detail += "rep " + std::to_string(r) + ": gap=" + fmt("%.3f", rep.gap) + " genes " +
              std::to_string(rep.recovered) + "/" + std::to_string(rep.n_true) + "+" +
              std::to_string(rep.false_genes) + "fp";
  }
  const double mean_gap = gap_sum / n_replicates;
  const bool pass = n_pass >= 4 && mean_gap >= 0.15;
  return {pass, detail + "; " + std::to_string(n_pass) + "/5 pass, mean gap = " +
                    fmt("%.3f", mean_gap) + " (need >= 4/5 and mean gap >= 0.15)"};
}

// ---------------------------------------------------------------------------
// criterion 6: survival augmentation draws the exact truncated conditional
// ---------------------------------------------------------------------------
// n = 12 with one censored entry: 50000 augmentation sweeps of that
// coordinate against a quadrature CDF of the joint-t full conditional
// (Kolmogorov-Smirnov distance < 0.02); with no censoring the augmented
// vector must equal the observed log times exactly.

Outcome criterion_augmentation() {
  Rng rng = make_rng(4400, 0);
  const int n = 12;
  const auto membership = testutil::random_membership(rng, 4, 14, 3, 6);

  const Matrix raw = random_raw_expression(rng, n, membership.n_genes);
  Vector log_times = testutil::random_response(rng, n);
  const Vector times = log_times.array().exp();

  // all observed: augmentation must reproduce the log times bit for bit
  {
    const std::vector<std::uint8_t> all_events(static_cast<std::size_t>(n), 1);
    const Dataset data =
        make_dataset(sample_ids(n), raw, times, all_events, OutcomeKind::survival);
    ModelState state = testutil::random_valid_state(rng, membership);
    state.z_latent = testutil::random_response(rng, n);  // stale everywhere
    Hyperparameters hp;
    const ScoreMatrix scores = build_score_matrix(data, membership, state);
    const Vector z = augment_aft(state, data, scores, hp, rng);
    if ((z - data.response).cwiseAbs().maxCoeff() != 0.0)
      return {false, "observed log times were not reproduced exactly"};
  }

  // one censored coordinate: compare against the quadrature CDF
  std::vector<std::uint8_t> delta(static_cast<std::size_t>(n), 1);
  const int censored = 4;
  delta[static_cast<std::size_t>(censored)] = 0;
  const Dataset data = make_dataset(sample_ids(n), raw, times, delta, OutcomeKind::survival);

  Hyperparameters hp;
  ModelState state = testutil::random_valid_state(rng, membership);
  state.z_latent = data.response;
  const ScoreMatrix scores = build_score_matrix(data, membership, state);

  const double lower = data.response[censored];
  const int n_draws = 50000;
  std::vector<double> draws;
  draws.reserve(n_draws);
  for (int rep = 0; rep < n_draws; ++rep) {
    ModelState fresh = state;  // identical conditioning state every sweep
    const Vector z = augment_aft(fresh, data, scores, hp, rng);
    draws.push_back(z[censored]);
  }

  const Vector location = marginal_location(scores.scores, hp);
  const Matrix sigma = marginal_scale(scores.scores, hp);
  const auto cond = oracle::censored_conditional_cdf(data.response, censored, lower, location,
                                                     sigma, hp.nu0, lower + 60.0, 20000);
  const double ks = oracle::ks_distance(draws, [&](double q) { return cond.cdf_at(q); });
  return {ks < 0.02, "ks = " + fmt("%.4f", ks) + " over 50000 draws (tolerance 0.02), " +
                         "observed entries exact"};
}

// ---------------------------------------------------------------------------
// criterion 7: independent chains agree; equal seeds reproduce bit for bit
// ---------------------------------------------------------------------------
// Two chains with different RNG streams on one synthetic instance must reach
// pathway-marginal concordance >= 0.95; re-running the same configuration
// must reproduce every chain's states file byte for byte, while the two
// streams within a run must differ.

Outcome criterion_chains() {
  Rng rng = make_rng(4500, 0);
  StructureConfig sc;
  sc.n_pathways = 12;
  sc.genes_per_pathway_min = 8;
  sc.genes_per_pathway_max = 14;
  const auto [membership, network] = random_structure(sc, rng);

  SimConfig cfg;
  cfg.n_samples = 80;
  cfg.n_true_pathways = 2;
  cfg.beta_magnitude = 1.5;
  const SimTruth truth = select_truth(membership, network, cfg, rng);
  const SimData sim = generate(membership, network, truth, cfg, rng);
  const Dataset data = make_dataset(sample_ids(cfg.n_samples), sim.expression, sim.response, {},
                                    OutcomeKind::continuous);

  Hyperparameters hp;
  RunSettings settings;
  settings.iterations = 100000;
  settings.burn_in = 20000;
  settings.eta_update_every = 4;
  settings.seed = 4501;

  const auto first = run_chains(data, membership, network, hp, settings, 2);
  const auto corr = chain_concordance(first[0], first[1]);
  if (!corr) return {false, "chain concordance undefined (zero variance in marginals)"};

  auto states_text = [](const ChainTrace& t) {
    std::ostringstream out;
    write_states_csv(out, t);
    return out.str();
  };
  const auto second = run_chains(data, membership, network, hp, settings, 2);
  const bool reproduced = states_text(first[0]) == states_text(second[0]) &&
                          states_text(first[1]) == states_text(second[1]);
  const bool streams_differ = states_text(first[0]) != states_text(first[1]);

  const bool pass = *corr >= 0.95 && reproduced && streams_differ;
  return {pass, "concordance = " + fmt("%.4f", *corr) + " (need >= 0.95), rerun identical = " +
                    (reproduced ? "yes" : "NO") + ", streams differ = " +
                    (streams_differ ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// criterion 8: thresholded prediction equals the closed-form ridge solution
// ---------------------------------------------------------------------------
// The prediction pipeline (train-mean centering, per-pathway principal
// component scores aligned to the supervised scores, ridge coefficients)
// must match an independent assembly that solves the normal equations by
// full-pivot LU, to 1e-8.  The README must also document the external
// reference errors 1.4497 (continuous benchmark) and 1.7614 (survival
// benchmark) for comparison runs.

Outcome criterion_prediction() {
  Rng rng = make_rng(4600, 0);
  std::vector<std::pair<std::string, std::string>> pairs;
  auto add_block = [&pairs](const std::string& pw, int lo, int hi) {
    for (int j = lo; j <= hi; ++j) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "G%02d", j);
      pairs.emplace_back(pw, buf);
    }
  };
  add_block("PW0", 0, 4);
  add_block("PW1", 4, 8);
  add_block("PW2", 8, 11);
  const auto membership = make_membership(pairs);

  const int n_train = 40, n_test = 25, p = 12;
  std::normal_distribution<double> normal(0.0, 1.0);
  auto make_block = [&](int n) {
    Matrix raw = random_raw_expression(rng, n, p);
    Vector y(n);
    for (int i = 0; i < n; ++i)
      y[i] = raw(i, 0) + 0.8 * raw(i, 1) - 1.1 * raw(i, 4) + 0.6 * raw(i, 5) + 0.5 * normal(rng);
    return std::make_pair(raw, y);
  };
  const auto [train_raw, train_y] = make_block(n_train);
  const auto [test_raw, test_y] = make_block(n_test);
  const Dataset train =
      make_dataset(sample_ids(n_train), train_raw, train_y, {}, OutcomeKind::continuous);
  const Dataset test =
      make_dataset(sample_ids(n_test), test_raw, test_y, {}, OutcomeKind::continuous);

  Selection sel;
  sel.theta = {1, 1, 0};
  sel.gamma = testutil::bits_of(0b001110111u, p);  // genes 0,1,2 and 4,5,6

  Hyperparameters hp;
  const Vector got = predict(train, test, membership, sel, hp);

  // independent assembly: library score construction, oracle linear algebra
  const std::vector<std::vector<int>> blocks = {{0, 1, 2, 4}, {4, 5, 6}};
  Matrix t_train(n_train, 2), t_test(n_test, 2);
  for (int c = 0; c < 2; ++c) {
    const auto& genes = blocks[static_cast<std::size_t>(c)];
    Matrix x_train(n_train, static_cast<int>(genes.size()));
    Matrix x_test(n_test, static_cast<int>(genes.size()));
    for (std::size_t s = 0; s < genes.size(); ++s) {
      x_train.col(static_cast<int>(s)) = train.expression.col(genes[s]);
      x_test.col(static_cast<int>(s)) =
          test_raw.col(genes[s]).array() - train.column_means[genes[s]];
    }
    const PlsResult pls = pls_first_component(x_train, train.response);
    const PcaResult pca = pca_first_component(x_train, &pls.scores);
    t_train.col(c) = pca.scores;
    t_test.col(c) = x_test * pca.loading;
  }
  const Matrix gram =
      t_train.transpose() * t_train + Matrix::Identity(2, 2) / hp.h;
  const Vector coef = Eigen::FullPivLU<Matrix>(gram).solve(t_train.transpose() * train.response);
  const Vector expected =
      Vector::Constant(n_test, train.response.mean()) + t_test * coef;

  const double worst = (got - expected).cwiseAbs().maxCoeff();
  const bool ridge_ok = worst < 1e-8;

  // the shipped README must pin the external benchmark errors
  bool readme_ok = false;
  std::string readme_note = "README.md missing";
  {
    std::ifstream in(std::string(PATHSEL_SOURCE_DIR) + "/README.md");
    if (in) {
      std::stringstream buffer;
      buffer << in.rdbuf();
      const std::string text = buffer.str();
      const bool a = text.find("1.4497") != std::string::npos;
      const bool b = text.find("1.7614") != std::string::npos;
      readme_ok = a && b;
      readme_note = std::string("README reference errors 1.4497/1.7614 ") +
                    (readme_ok ? "documented" : "NOT documented");
    }
  }
  return {ridge_ok && readme_ok, "max |prediction difference| = " + fmt("%.3g", worst) +
                                     " (tolerance 1e-8); " + readme_note};
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"marginal likelihood vs direct definition", criterion_likelihood},
      {"perfect MRF simulation vs enumeration", criterion_cftp},
      {"fixed-eta chain vs exact joint law", criterion_joint_law},
      {"eta exchange vs quadrature posterior", criterion_eta_posterior},
      {"synthetic-data pathway/gene recovery", criterion_recovery},
      {"survival augmentation vs truncated conditional", criterion_augmentation},
      {"chain concordance and bitwise reproducibility", criterion_chains},
      {"prediction vs closed-form ridge + documented references", criterion_prediction},
  };

  bool all_pass = true;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && outcome.pass;
    std::cout << "criterion " << index << " (" << c.label << "): "
              << (outcome.pass ? "PASS" : "FAIL") << " — " << outcome.detail << "\n";
    std::cout.flush();
  }
  std::cout << (all_pass ? "acceptance: all criteria passed"
                         : "acceptance: at least one criterion FAILED")
            << "\n";
  return all_pass ? 0 : 1;
}
