#include "pathsel/sampler.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>
#include <utility>

namespace pathsel {

// ===========================================================================
// move enumeration
// ===========================================================================

namespace {

// Additive fingerprints for selected-gene subsets: the hash of a subset is
// the wrap-around sum of per-gene salts, so toggling one gene adjusts the
// hash in O(1).  Equal hashes are confirmed by exact comparison before a
// candidate is declared a duplicate.  Salts come from a fixed-seed stream, so
// salt j is identical in every process regardless of the gene count; the
// per-thread cache is rebuilt (with an identical prefix) only when a larger
// gene set appears, and shared ownership keeps live enumerators safe.
std::shared_ptr<const std::vector<std::uint64_t>> subset_salts(int n_genes) {
  thread_local std::shared_ptr<const std::vector<std::uint64_t>> cache;
  if (!cache || static_cast<int>(cache->size()) < n_genes) {
    Rng rng = make_rng(0x70617468u, 1);
    auto fresh = std::make_shared<std::vector<std::uint64_t>>();
    fresh->reserve(static_cast<std::size_t>(n_genes));
    for (int i = 0; i < n_genes; ++i) fresh->push_back(rng());
    cache = std::move(fresh);
  }
  return cache;
}

struct MoveCandidate {
  int pathway = -1;
  int gene = -1;
};

MoveDirection opposite(MoveDirection d) {
  return d == MoveDirection::add ? MoveDirection::remove : MoveDirection::add;
}

class MoveEnumerator {
 public:
  MoveEnumerator(const ModelState& state, const PathwayMembership& membership)
      : state_(state), mem_(membership), salts_(subset_salts(membership.n_genes)) {
    build_summaries();
    for (int k = 0; k < 3; ++k)
      for (int d = 0; d < 2; ++d)
        counts_.counts[k][d] = enumerate(static_cast<MoveKind>(k),
                                         static_cast<MoveDirection>(d), -1, nullptr);
  }

  const MoveCounts& counts() const { return counts_; }

  MoveCandidate nth(MoveKind kind, MoveDirection dir, int index) const {
    MoveCandidate out;
    const int found = enumerate(kind, dir, index, &out);
    if (found != index + 1) throw std::logic_error("move candidate index out of range");
    return out;
  }

 private:
  void build_summaries() {
    const int p = mem_.n_genes;
    const int k_count = mem_.n_pathways;
    cover_.assign(static_cast<std::size_t>(p), 0);
    member_of_selected_.assign(static_cast<std::size_t>(p), 0);
    subset_hash_.assign(static_cast<std::size_t>(k_count), 0);
    subset_size_.assign(static_cast<std::size_t>(k_count), 0);
    low_cover_.assign(static_cast<std::size_t>(k_count), 0);

    for (int k = 0; k < k_count; ++k) {
      if (!state_.theta[k]) continue;
      for (int j : mem_.genes_in_pathway[k]) {
        member_of_selected_[j] = 1;
        if (state_.gamma[j]) ++cover_[j];
      }
      selected_.push_back(k);
    }
    // subset_hash_/subset_size_ describe members(k) ∩ gamma for every pathway,
    // selected or not (for unselected pathways that is the subset it would
    // enter the model with).
    for (int k = 0; k < k_count; ++k) {
      for (int j : mem_.genes_in_pathway[k]) {
        if (!state_.gamma[j]) continue;
        subset_hash_[k] += salt(j);
        ++subset_size_[k];
      }
    }
    for (int k : selected_) {
      for (int j : mem_.genes_in_pathway[k])
        if (state_.gamma[j] && cover_[j] == 1) ++low_cover_[k];
    }
  }

  std::uint64_t salt(int j) const { return (*salts_)[static_cast<std::size_t>(j)]; }

  // Selected-gene subset of pathway k, with gene `toggle` forced to `value`.
  std::vector<int> subset_with(int k, int toggle, bool value) const {
    std::vector<int> out;
    for (int j : mem_.genes_in_pathway[k]) {
      const bool g = (j == toggle) ? value : (state_.gamma[j] != 0);
      if (g) out.push_back(j);
    }
    return out;
  }

  bool valid_both_add(int k, int j) const {
    // New pathway k enters with subset S = (members(k) ∩ gamma) ∪ {j}.  Since
    // gamma_j = 0, no existing subset contains j, so only selected pathways
    // that also gain j (i.e. contain it as a member) can collide with S.
    const std::uint64_t new_hash = subset_hash_[k] + salt(j);
    for (int other : selected_) {
      if (!mem_.contains(other, j)) continue;
      if (subset_hash_[other] + salt(j) == new_hash &&
          subset_with(other, j, true) == subset_with(k, j, true))
        return false;
    }
    return true;
  }

  bool valid_both_remove(int k, int j) const {
    // Other selected pathways holding j lose it: they must keep >= 1 gene.
    for (int other : mem_.pathways_of_gene[j]) {
      if (other == k || !state_.theta[other]) continue;
      if (subset_size_[other] < 2) return false;
    }
    // Genes of S_k other than j must stay covered once k leaves.
    const int low = low_cover_[k] - (cover_[j] == 1 ? 1 : 0);
    if (low != 0) return false;
    // Duplicates among the remaining selected pathways (those containing j
    // shrink by one gene, the rest keep their subsets).
    return !creates_duplicate_after_gene_drop(j, k);
  }

  bool valid_gene_add(int j) const {
    // gamma_j = 0 means j is in no current subset; pathways gaining j can
    // only match each other, which would require equal pre-move subsets —
    // impossible in a valid state.  Coverage is the only requirement: some
    // selected pathway must have j as a member (note cover_ counts covering
    // pathways of *selected* genes only, so it is always 0 here).
    return member_of_selected_[j] != 0;
  }

  bool valid_gene_remove(int j) const {
    for (int k : mem_.pathways_of_gene[j]) {
      if (!state_.theta[k]) continue;
      if (subset_size_[k] < 2) return false;  // pathway would lose its last gene
    }
    return !creates_duplicate_after_gene_drop(j, -1);
  }

  bool valid_path_add(int k) const {
    if (subset_size_[k] == 0) return false;  // would enter empty
    for (int other : selected_) {
      if (subset_hash_[other] == subset_hash_[k] &&
          subset_with(other, -1, false) == subset_with(k, -1, false))
        return false;
    }
    return true;
  }

  bool valid_path_remove(int k) const {
    // Every gene of S_k must be covered by another selected pathway; the
    // remaining subsets are unchanged, so no other constraint can break.
    return low_cover_[k] == 0;
  }

  // After dropping gene j from gamma (and pathway `excluded` from theta, if
  // >= 0), do two remaining selected pathways share a subset?
  bool creates_duplicate_after_gene_drop(int j, int excluded) const {
    scratch_.clear();
    for (int k : selected_) {
      if (k == excluded) continue;
      const bool holds_j = mem_.contains(k, j);
      scratch_.push_back({subset_hash_[k] - (holds_j ? salt(j) : 0), k});
    }
    std::sort(scratch_.begin(), scratch_.end());
    for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
      if (scratch_[i].first != scratch_[i + 1].first) continue;
      if (subset_with(scratch_[i].second, j, false) == subset_with(scratch_[i + 1].second, j, false))
        return true;
    }
    return false;
  }

  // Iterates candidates of one (kind, direction) in canonical order.  With
  // stop_at < 0 returns the total count; otherwise fills `out` with candidate
  // number stop_at (0-based) and returns stop_at + 1.
  int enumerate(MoveKind kind, MoveDirection dir, int stop_at, MoveCandidate* out) const {
    int count = 0;
    const auto visit = [&](int pathway, int gene) {
      if (count == stop_at && out != nullptr) {
        out->pathway = pathway;
        out->gene = gene;
      }
      ++count;
      return stop_at >= 0 && count > stop_at;  // true -> stop
    };

    const int k_count = mem_.n_pathways;
    const int p = mem_.n_genes;
    switch (kind) {
      case MoveKind::both:
        if (dir == MoveDirection::add) {
          for (int k = 0; k < k_count; ++k) {
            if (state_.theta[k]) continue;
            for (int j : mem_.genes_in_pathway[k]) {
              if (state_.gamma[j] || !valid_both_add(k, j)) continue;
              if (visit(k, j)) return count;
            }
          }
        } else {
          for (int k : selected_) {
            for (int j : mem_.genes_in_pathway[k]) {
              if (!state_.gamma[j] || !valid_both_remove(k, j)) continue;
              if (visit(k, j)) return count;
            }
          }
        }
        break;
      case MoveKind::gene_only:
        for (int j = 0; j < p; ++j) {
          if (dir == MoveDirection::add) {
            if (state_.gamma[j] || !valid_gene_add(j)) continue;
          } else {
            if (!state_.gamma[j] || !valid_gene_remove(j)) continue;
          }
          if (visit(-1, j)) return count;
        }
        break;
      case MoveKind::pathway_only:
        for (int k = 0; k < k_count; ++k) {
          if (dir == MoveDirection::add) {
            if (state_.theta[k] || !valid_path_add(k)) continue;
          } else {
            if (!state_.theta[k] || !valid_path_remove(k)) continue;
          }
          if (visit(k, -1)) return count;
        }
        break;
    }
    return count;
  }

  const ModelState& state_;
  const PathwayMembership& mem_;
  std::shared_ptr<const std::vector<std::uint64_t>> salts_;
  MoveCounts counts_;
  std::vector<int> cover_;
  std::vector<std::uint8_t> member_of_selected_;
  std::vector<std::uint64_t> subset_hash_;
  std::vector<int> subset_size_;
  std::vector<int> low_cover_;
  std::vector<int> selected_;
  mutable std::vector<std::pair<std::uint64_t, int>> scratch_;
};

}  // namespace

int MoveCounts::n_feasible_kinds() const {
  int n = 0;
  for (int k = 0; k < 3; ++k) n += kind_feasible(static_cast<MoveKind>(k));
  return n;
}

int MoveCounts::n_feasible_directions(MoveKind k) const {
  return (count(k, MoveDirection::add) > 0) + (count(k, MoveDirection::remove) > 0);
}

MoveCounts count_move_candidates(const ModelState& state, const PathwayMembership& membership) {
  return MoveEnumerator(state, membership).counts();
}

ModelState apply_move(const ModelState& state, const MoveProposal& move) {
  ModelState next = state;
  const std::uint8_t on = move.direction == MoveDirection::add ? 1 : 0;
  if (move.pathway >= 0) next.theta[move.pathway] = on;
  if (move.gene >= 0) next.gamma[move.gene] = on;
  return next;
}

MoveProposal propose_move(const ModelState& state, const PathwayMembership& membership, Rng& rng) {
  const MoveEnumerator enumerator(state, membership);
  const MoveCounts& mc = enumerator.counts();

  std::vector<MoveKind> kinds;
  for (int k = 0; k < 3; ++k)
    if (mc.kind_feasible(static_cast<MoveKind>(k))) kinds.push_back(static_cast<MoveKind>(k));
  if (kinds.empty()) throw std::logic_error("no feasible move from current state");
  const MoveKind kind = kinds[std::uniform_int_distribution<std::size_t>(0, kinds.size() - 1)(rng)];

  std::vector<MoveDirection> dirs;
  for (MoveDirection d : {MoveDirection::add, MoveDirection::remove})
    if (mc.count(kind, d) > 0) dirs.push_back(d);
  const MoveDirection dir = dirs[std::uniform_int_distribution<std::size_t>(0, dirs.size() - 1)(rng)];

  const int n_forward = mc.count(kind, dir);
  const int index = std::uniform_int_distribution<int>(0, n_forward - 1)(rng);
  const MoveCandidate cand = enumerator.nth(kind, dir, index);

  MoveProposal move;
  move.kind = kind;
  move.direction = dir;
  move.pathway = cand.pathway;
  move.gene = cand.gene;

  // Reverse-path probability from the proposed state: same kind, opposite
  // direction, same (pathway, gene); forward and reverse are both products of
  // three uniform choices.
  const ModelState next = apply_move(state, move);
  const MoveCounts mc_next = count_move_candidates(next, membership);
  const int n_reverse = mc_next.count(kind, opposite(dir));
  assert(n_reverse > 0);

  move.log_proposal_ratio =
      (std::log(mc.n_feasible_kinds()) + std::log(mc.n_feasible_directions(kind)) +
       std::log(n_forward)) -
      (std::log(mc_next.n_feasible_kinds()) + std::log(mc_next.n_feasible_directions(kind)) +
       std::log(n_reverse));
  return move;
}

// ===========================================================================
// state evaluation shared by the standalone step and the chain driver
// ===========================================================================

namespace {

const Vector& regression_response(const Dataset& data, const ModelState& state) {
  if (data.outcome_kind == OutcomeKind::survival && state.z_latent) return *state.z_latent;
  return data.response;
}

struct EvalCache {
  GeneNetwork active;
  ScoreMatrix scores;
  double loglik = 0.0;
  double logprior = 0.0;
};

EvalCache evaluate_state(const ModelState& state, const Dataset& data,
                         const PathwayMembership& membership, const GeneNetwork& network,
                         const Hyperparameters& hp, EdgeRule rule) {
  EvalCache cache;
  cache.active = active_adjacency(network, membership, state.theta, rule);
  const Vector& y = regression_response(data, state);
  cache.scores = build_score_matrix(data.expression, y, membership, state);
  cache.loglik = marginal_log_likelihood(y, cache.scores.scores, hp);
  cache.logprior = joint_log_prior_active(state, membership, cache.active, hp);
  return cache;
}

bool theta_changed(const MoveProposal& move) { return move.pathway >= 0; }

}  // namespace

StepResult mh_step_theta_gamma(ModelState& state, const Dataset& data,
                               const PathwayMembership& membership, const GeneNetwork& network,
                               const Hyperparameters& hp, EdgeRule rule, Rng& rng) {
  const EvalCache current = evaluate_state(state, data, membership, network, hp, rule);

  StepResult result;
  result.proposal = propose_move(state, membership, rng);
  const ModelState next = apply_move(state, result.proposal);
  const EvalCache proposed = evaluate_state(next, data, membership, network, hp, rule);

  const double log_alpha = proposed.loglik + proposed.logprior - current.loglik -
                           current.logprior + result.proposal.log_proposal_ratio;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (std::log(unif(rng)) < log_alpha) {
    state = next;
    result.accepted = true;
  }
  return result;
}

// ===========================================================================
// eta update
// ===========================================================================

double reflect_into_interval(double x, double length) {
  if (!(length > 0)) throw std::invalid_argument("reflect: interval length must be positive");
  double m = std::fmod(x, 2.0 * length);
  if (m < 0) m += 2.0 * length;
  return m <= length ? m : 2.0 * length - m;
}

double eta_log_accept_ratio(double eta_cur, double eta_prop, const BinaryVector& w_cur,
                            const BinaryVector& w_prop, const BinaryVector& gamma,
                            const GeneNetwork& active, const Hyperparameters& hp, double eta_ref) {
  // Exchange-step ratio.  Writing q_e(v) = exp(mu |v| + e v'Rv) and f = q_ref
  // normalized at eta_ref, the extended-space Metropolis ratio
  //   [p(eta') q_eta'(gamma) f(w')]^-1-free form:
  //   q_ref(w') q_eta(w) p(eta') q_eta'(gamma)
  //   --------------------------------------- (all normalizers cancel)
  //   q_ref(w)  q_eta'(w') p(eta) q_eta(gamma)
  // reduces to the quadratic-form expression below; the mu-terms cancel
  // because each configuration appears once in numerator and denominator.
  const double q_wp = mrf_quad_form(w_prop, active);
  const double q_wc = mrf_quad_form(w_cur, active);
  const double q_g = mrf_quad_form(gamma, active);
  return (eta_ref - eta_prop) * q_wp - (eta_ref - eta_cur) * q_wc + (eta_prop - eta_cur) * q_g +
         eta_log_prior(eta_prop, hp) - eta_log_prior(eta_cur, hp);
}

bool update_eta(ModelState& state, const GeneNetwork& active, const Hyperparameters& hp,
                double step_sd, const CftpSettings& cftp, EtaAuxiliary& aux, Rng& rng) {
  const double eta_ref = hp.eta_pt / 2.0;
  ++aux.proposals;

  if (!aux.valid) {
    try {
      aux.w = cftp_perfect_sample(active, hp.mu_mrf, eta_ref, rng, cftp);
      aux.valid = true;
    } catch (const CftpError&) {
      ++aux.cftp_failures;
      return false;
    }
  }

  std::normal_distribution<double> step(0.0, step_sd);
  const double eta_prop = reflect_into_interval(state.eta + step(rng), hp.eta_pt);

  BinaryVector w_prop;
  try {
    w_prop = cftp_perfect_sample(active, hp.mu_mrf, eta_prop, rng, cftp);
  } catch (const CftpError&) {
    ++aux.cftp_failures;
    return false;  // treat a failed auxiliary draw as a rejection
  }

  const double log_h = eta_log_accept_ratio(state.eta, eta_prop, aux.w, w_prop, state.gamma,
                                            active, hp, eta_ref);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (std::log(unif(rng)) < log_h) {
    state.eta = eta_prop;
    aux.w = std::move(w_prop);
    ++aux.accepts;
    return true;
  }
  return false;
}

// ===========================================================================
// survival-data augmentation
// ===========================================================================

double sample_truncated_t_lower(double location, double scale, double df, double lower, Rng& rng) {
  if (!(scale > 0)) throw std::invalid_argument("truncated t: scale must be positive");
  const boost::math::students_t dist(df);
  const double a = (lower - location) / scale;
  const double tail = boost::math::cdf(boost::math::complement(dist, a));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  // Inversion on the upper tail: target tail mass tail*(1-u) stays away from
  // catastrophic cancellation however deep the truncation point sits.
  double x;
  const double target = tail * (1.0 - u);
  if (target <= 0) {
    x = a;  // tail underflowed: the conditional is a point mass at the bound
  } else {
    x = boost::math::quantile(boost::math::complement(dist, target));
  }
  double z = location + scale * x;
  if (z < lower) z = lower;  // guard against quantile round-off
  return z;
}

Vector augment_aft(const ModelState& state, const Dataset& data, const ScoreMatrix& scores,
                   const Hyperparameters& hp, Rng& rng) {
  if (data.outcome_kind != OutcomeKind::survival)
    throw std::invalid_argument("augment_aft requires a survival outcome");
  const int n = data.n_samples;

  Vector z = state.z_latent ? *state.z_latent : data.response;
  for (int i = 0; i < n; ++i)
    if (data.censoring[static_cast<std::size_t>(i)]) z[i] = data.response[i];

  const Vector location = marginal_location(scores.scores, hp);
  const Matrix sigma = marginal_scale(scores.scores, hp);
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw std::runtime_error("scale not positive definite");
  const Matrix lambda = llt.solve(Matrix::Identity(n, n));

  // One systematic sweep over the censored entries.  Conditional on z_-i the
  // latent value follows a univariate t with nu0 + n - 1 degrees of freedom:
  //   center   m_i - (Lambda r)_i-without-i / Lambda_ii
  //   scale^2  (nu0 + d_rest) / (nu0 + n - 1) / Lambda_ii
  // where d_rest is the quadratic form of the remaining coordinates under
  // their own marginal scale; all pieces are updated in O(n) per draw.
  Vector r = z - location;
  Vector lr = lambda * r;
  double full_quad = r.dot(lr);

  const double df = hp.nu0 + n - 1;
  for (int i = 0; i < n; ++i) {
    if (data.censoring[static_cast<std::size_t>(i)]) continue;  // observed event: clamped
    const double lii = lambda(i, i);
    const double v = lr[i] - lii * r[i];
    double d_rest = full_quad - 2.0 * r[i] * v - lii * r[i] * r[i] - v * v / lii;
    if (d_rest < 0) d_rest = 0;  // round-off guard
    const double center = location[i] - v / lii;
    const double scale = std::sqrt((hp.nu0 + d_rest) / (df * lii));
    const double z_new = sample_truncated_t_lower(center, scale, df, data.response[i], rng);

    const double delta = z_new - z[i];
    full_quad += 2.0 * delta * lr[i] + lii * delta * delta;
    lr += lambda.col(i) * delta;
    r[i] += delta;
    z[i] = z_new;
  }
  return z;
}

// ===========================================================================
// checkpoints
// ===========================================================================

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.precision(17);
  out << "pathsel-checkpoint 1\n";
  out << "iteration " << checkpoint.iteration << "\n";
  out << "theta " << to_hex(checkpoint.state.theta) << "\n";
  out << "gamma " << to_hex(checkpoint.state.gamma) << "\n";
  out << "eta " << checkpoint.state.eta << "\n";
  out << "z";
  if (checkpoint.state.z_latent)
    for (int i = 0; i < checkpoint.state.z_latent->size(); ++i)
      out << " " << (*checkpoint.state.z_latent)[i];
  else
    out << " -";
  out << "\n";
  out << "aux " << (checkpoint.aux.valid ? to_hex(checkpoint.aux.w) : std::string("-")) << " "
      << checkpoint.aux.proposals << " " << checkpoint.aux.accepts << " "
      << checkpoint.aux.cftp_failures << "\n";
  out << "rng " << checkpoint.rng_state << "\n";
  if (!out) throw DataError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path, int n_pathways, int n_genes) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::string line, tag;

  Checkpoint ck;
  if (!std::getline(in, line) || line != "pathsel-checkpoint 1")
    throw DataError("unrecognized checkpoint header in " + path);

  auto expect = [&](const std::string& want) -> std::istringstream {
    if (!std::getline(in, line)) throw DataError("truncated checkpoint: " + path);
    std::istringstream ss(line);
    ss >> tag;
    if (tag != want) throw DataError("checkpoint field '" + want + "' missing in " + path);
    return ss;
  };

  {
    auto ss = expect("iteration");
    ss >> ck.iteration;
  }
  {
    auto ss = expect("theta");
    std::string hex;
    ss >> hex;
    ck.state.theta = from_hex(hex, n_pathways);
  }
  {
    auto ss = expect("gamma");
    std::string hex;
    ss >> hex;
    ck.state.gamma = from_hex(hex, n_genes);
  }
  {
    auto ss = expect("eta");
    ss >> ck.state.eta;
  }
  {
    auto ss = expect("z");
    std::vector<double> zs;
    std::string tok;
    while (ss >> tok) {
      if (tok == "-") break;
      zs.push_back(std::stod(tok));
    }
    if (!zs.empty()) {
      Vector z(static_cast<int>(zs.size()));
      for (std::size_t i = 0; i < zs.size(); ++i) z[static_cast<int>(i)] = zs[i];
      ck.state.z_latent = z;
    }
  }
  {
    auto ss = expect("aux");
    std::string w;
    ss >> w >> ck.aux.proposals >> ck.aux.accepts >> ck.aux.cftp_failures;
    if (w != "-") {
      ck.aux.w = from_hex(w, n_genes);
      ck.aux.valid = true;
    }
  }
  {
    if (!std::getline(in, line)) throw DataError("truncated checkpoint: " + path);
    if (line.rfind("rng ", 0) != 0) throw DataError("checkpoint field 'rng' missing in " + path);
    ck.rng_state = line.substr(4);
  }
  return ck;
}

// ===========================================================================
// chain driver
// ===========================================================================

namespace {

void pack_bits(const BinaryVector& bits, int words, std::vector<std::uint64_t>& sink) {
  for (int w = 0; w < words; ++w) {
    std::uint64_t word = 0;
    for (int b = 0; b < 64; ++b) {
      const std::size_t j = static_cast<std::size_t>(w) * 64 + static_cast<std::size_t>(b);
      if (j < bits.size() && bits[j]) word |= std::uint64_t{1} << b;
    }
    sink.push_back(word);
  }
}

BinaryVector unpack_bits(const std::vector<std::uint64_t>& words, int words_per_record,
                         std::int64_t record, int n_bits) {
  BinaryVector bits(static_cast<std::size_t>(n_bits), 0);
  const std::size_t base = static_cast<std::size_t>(record) * static_cast<std::size_t>(words_per_record);
  for (int j = 0; j < n_bits; ++j)
    bits[j] = (words[base + static_cast<std::size_t>(j / 64)] >> (j % 64)) & 1;
  return bits;
}

class ChainRunner {
 public:
  ChainRunner(const Dataset& data, const PathwayMembership& membership,
              const GeneNetwork& network, const Hyperparameters& hp, const RunSettings& settings,
              std::uint64_t rng_stream)
      : data_(data), mem_(membership), net_(network), hp_(hp), settings_(settings),
        rng_(make_rng(settings.seed, rng_stream)) {
    hp_.validate();
    if (membership.n_genes != network.n_genes || membership.n_genes != data.n_genes())
      throw DataError("membership, network, and expression disagree on the gene set");
    cftp_.t_max = settings.cftp_t_max;
  }

  ChainTrace run() {
    ChainTrace trace;
    trace.n_pathways = mem_.n_pathways;
    trace.n_genes = mem_.n_genes;
    trace.burn_in = settings_.burn_in;
    trace.seed = settings_.seed;
    trace.theta_words = (mem_.n_pathways + 63) / 64;
    trace.gamma_words = (mem_.n_genes + 63) / 64;

    std::int64_t start = 0;
    if (!settings_.resume_from.empty()) {
      const Checkpoint ck = load_checkpoint(settings_.resume_from, mem_.n_pathways, mem_.n_genes);
      state_ = ck.state;
      aux_ = ck.aux;
      std::istringstream ss(ck.rng_state);
      ss >> rng_;
      if (!ss) throw DataError("cannot parse RNG state in " + settings_.resume_from);
      start = ck.iteration + 1;
    } else {
      initialize_state();
    }
    cache_ = evaluate_state(state_, data_, mem_, net_, hp_, settings_.edge_rule);

    const std::int64_t total = settings_.iterations;
    trace.iteration.reserve(static_cast<std::size_t>(total - start));
    for (std::int64_t iter = start; iter < total; ++iter) {
      step_theta_gamma(trace);
      if (settings_.eta_update_every > 0 && iter % settings_.eta_update_every == 0) {
        ++trace.eta_proposals;
        const auto before_accepts = aux_.accepts;
        update_eta(state_, cache_.active, hp_, settings_.eta_step_fraction * hp_.eta_pt, cftp_,
                   aux_, rng_);
        trace.eta_accepts += aux_.accepts - before_accepts;
      }
      if (data_.outcome_kind == OutcomeKind::survival) {
        Vector z = augment_aft(state_, data_, cache_.scores, hp_, rng_);
        state_.z_latent = std::move(z);
        refresh_regression();
      }
      record(trace, iter);
      if (settings_.checkpoint_every > 0 && !settings_.checkpoint_path.empty() &&
          (iter + 1) % settings_.checkpoint_every == 0) {
        save(iter);
      }
    }
    trace.cftp_failures = aux_.cftp_failures;
    return trace;
  }

 private:
  void initialize_state() {
    state_.theta.assign(static_cast<std::size_t>(mem_.n_pathways), 0);
    state_.gamma.assign(static_cast<std::size_t>(mem_.n_genes), 0);
    if (settings_.eta_init) {
      state_.eta = *settings_.eta_init;
      if (state_.eta < 0 || state_.eta > hp_.eta_pt)
        throw std::invalid_argument("eta_init outside [0, eta_pt]");
    } else {
      // draw from the prior: Beta(c0, d0) scaled to [0, eta_pt]
      std::gamma_distribution<double> gc(hp_.c0, 1.0), gd(hp_.d0, 1.0);
      const double a = gc(rng_), b = gd(rng_);
      state_.eta = hp_.eta_pt * (a / (a + b));
    }
    if (data_.outcome_kind == OutcomeKind::survival) state_.z_latent = data_.response;

    // Seed the model with a few random pathway/gene pairs so chains from
    // different seeds start in different corners of the space.
    for (int added = 0; added < settings_.init_pathways; ++added) {
      const MoveEnumerator enumerator(state_, mem_);
      const int n = enumerator.counts().count(MoveKind::both, MoveDirection::add);
      if (n == 0) break;
      const int index = std::uniform_int_distribution<int>(0, n - 1)(rng_);
      const MoveCandidate cand = enumerator.nth(MoveKind::both, MoveDirection::add, index);
      MoveProposal move;
      move.kind = MoveKind::both;
      move.direction = MoveDirection::add;
      move.pathway = cand.pathway;
      move.gene = cand.gene;
      state_ = apply_move(state_, move);
    }
  }

  void step_theta_gamma(ChainTrace& trace) {
    ++trace.move_proposals;
    const MoveProposal move = propose_move(state_, mem_, rng_);
    const ModelState next = apply_move(state_, move);
    const EvalCache proposed = evaluate_state(next, data_, mem_, net_, hp_, settings_.edge_rule);
    const double log_alpha = proposed.loglik + proposed.logprior - cache_.loglik -
                             cache_.logprior + move.log_proposal_ratio;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (std::log(unif(rng_)) < log_alpha) {
      state_ = next;
      cache_ = proposed;
      ++trace.move_accepts;
      if (theta_changed(move)) aux_.valid = false;  // active adjacency changed
    }
  }

  void refresh_regression() {
    const Vector& y = regression_response(data_, state_);
    cache_.scores = build_score_matrix(data_.expression, y, mem_, state_);
    cache_.loglik = marginal_log_likelihood(y, cache_.scores.scores, hp_);
  }

  void record(ChainTrace& trace, std::int64_t iter) {
    trace.iteration.push_back(iter);
    pack_bits(state_.theta, trace.theta_words, trace.theta_bits);
    pack_bits(state_.gamma, trace.gamma_words, trace.gamma_bits);
    trace.eta.push_back(state_.eta);
    trace.log_posterior.push_back(cache_.loglik + cache_.logprior + eta_log_prior(state_.eta, hp_));
    trace.k_theta.push_back(state_.k_theta());
    trace.n_selected.push_back(state_.n_selected_genes());
  }

  void save(std::int64_t iter) const {
    Checkpoint ck;
    ck.iteration = iter;
    ck.state = state_;
    ck.aux = aux_;
    std::ostringstream ss;
    ss << rng_;
    ck.rng_state = ss.str();
    save_checkpoint(settings_.checkpoint_path, ck);
  }

  const Dataset& data_;
  const PathwayMembership& mem_;
  const GeneNetwork& net_;
  Hyperparameters hp_;
  RunSettings settings_;
  Rng rng_;
  ModelState state_;
  EvalCache cache_;
  EtaAuxiliary aux_;
  CftpSettings cftp_;
};

}  // namespace

BinaryVector ChainTrace::theta_at(std::int64_t record) const {
  return unpack_bits(theta_bits, theta_words, record, n_pathways);
}

BinaryVector ChainTrace::gamma_at(std::int64_t record) const {
  return unpack_bits(gamma_bits, gamma_words, record, n_genes);
}

ChainTrace run_chain(const Dataset& data, const PathwayMembership& membership,
                     const GeneNetwork& network, const Hyperparameters& hp,
                     const RunSettings& settings) {
  ChainRunner runner(data, membership, network, hp, settings, 0);
  return runner.run();
}

std::vector<ChainTrace> run_chains(const Dataset& data, const PathwayMembership& membership,
                                   const GeneNetwork& network, const Hyperparameters& hp,
                                   const RunSettings& settings, int n_chains) {
  if (n_chains < 1) throw std::invalid_argument("need at least one chain");
  std::vector<ChainTrace> traces(static_cast<std::size_t>(n_chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_chains));
  std::vector<std::thread> workers;
  for (int c = 0; c < n_chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        RunSettings chain_settings = settings;
        if (!chain_settings.checkpoint_path.empty())
          chain_settings.checkpoint_path += "." + std::to_string(c);
        if (!chain_settings.resume_from.empty())
          chain_settings.resume_from += "." + std::to_string(c);
        ChainRunner runner(data, membership, network, hp, chain_settings,
                           static_cast<std::uint64_t>(c));
        traces[static_cast<std::size_t>(c)] = runner.run();
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

}  // namespace pathsel
