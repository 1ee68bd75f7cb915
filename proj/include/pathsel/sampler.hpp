#pragma once

#include "pathsel/common.hpp"
#include "pathsel/dataset.hpp"
#include "pathsel/hyperparameters.hpp"
#include "pathsel/likelihood.hpp"
#include "pathsel/membership.hpp"
#include "pathsel/model_state.hpp"
#include "pathsel/mrf_sim.hpp"
#include "pathsel/network.hpp"
#include "pathsel/priors.hpp"
#include "pathsel/scores.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pathsel {

// ---------------------------------------------------------------------------
// (theta, gamma) moves
// ---------------------------------------------------------------------------

// A move either toggles one pathway and one of its member genes together
// (both), one gene inside the current selection (gene_only), or one pathway
// against the current gene selection (pathway_only).
enum class MoveKind { both, gene_only, pathway_only };
enum class MoveDirection { add, remove };

struct MoveProposal {
  MoveKind kind = MoveKind::both;
  MoveDirection direction = MoveDirection::add;
  int pathway = -1;  // -1 for gene_only moves
  int gene = -1;     // -1 for pathway_only moves
  // log q(current | proposed) - log q(proposed | current), accounting for the
  // uniform draws over feasible kinds, feasible directions, and candidates.
  double log_proposal_ratio = 0.0;
};

// Candidate counts for every (kind, direction) combination from a given
// state, counting only candidates that lead to a valid configuration.
struct MoveCounts {
  int counts[3][2] = {{0, 0}, {0, 0}, {0, 0}};

  int count(MoveKind k, MoveDirection d) const {
    return counts[static_cast<int>(k)][static_cast<int>(d)];
  }
  bool kind_feasible(MoveKind k) const {
    return count(k, MoveDirection::add) > 0 || count(k, MoveDirection::remove) > 0;
  }
  int n_feasible_kinds() const;
  int n_feasible_directions(MoveKind k) const;
};

MoveCounts count_move_candidates(const ModelState& state, const PathwayMembership& membership);

// Draws a move uniformly: first a kind among feasible kinds, then a direction
// among feasible directions of that kind, then a candidate uniformly.  The
// state must be valid; throws std::logic_error if no move is feasible.
MoveProposal propose_move(const ModelState& state, const PathwayMembership& membership, Rng& rng);

ModelState apply_move(const ModelState& state, const MoveProposal& move);

// One Metropolis-Hastings step on (theta, gamma) at fixed eta (and fixed Z
// under survival).  Returns whether the proposal was accepted; `state` is
// updated in place.  Standalone convenience built on the same internals as
// run_chain.
struct StepResult {
  bool accepted = false;
  MoveProposal proposal;
};
StepResult mh_step_theta_gamma(ModelState& state, const Dataset& data,
                               const PathwayMembership& membership, const GeneNetwork& network,
                               const Hyperparameters& hp, EdgeRule rule, Rng& rng);

// ---------------------------------------------------------------------------
// eta update (auxiliary-variable exchange step with perfect simulation)
// ---------------------------------------------------------------------------

// Persistent auxiliary state for the eta sampler: w is the retained auxiliary
// MRF configuration paired with the current eta.  It is (re)drawn by perfect
// simulation from the reference density at eta_ref whenever it is missing or
// the active adjacency changed since it was stored.
struct EtaAuxiliary {
  BinaryVector w;
  bool valid = false;
  std::int64_t proposals = 0;
  std::int64_t accepts = 0;
  std::int64_t cftp_failures = 0;
};

// Random-walk proposal reflected into [0, length]; symmetric by the method of
// images, so it contributes nothing to the acceptance ratio.
double reflect_into_interval(double x, double length);

// Log acceptance ratio of the exchange step.  All intractable normalizing
// constants cancel between the target, the reference density f(w) at
// eta_ref, and the auxiliary proposal, leaving
//   (eta_ref - eta_prop) w_prop' R w_prop - (eta_ref - eta_cur) w_cur' R w_cur
//   + (eta_prop - eta_cur) gamma' R gamma + log p(eta_prop) - log p(eta_cur).
double eta_log_accept_ratio(double eta_cur, double eta_prop, const BinaryVector& w_cur,
                            const BinaryVector& w_prop, const BinaryVector& gamma,
                            const GeneNetwork& active, const Hyperparameters& hp, double eta_ref);

// One eta update given the current gamma and active adjacency.  step_sd is
// the random-walk standard deviation.  A CFTP failure counts as a rejection.
// Returns true if the proposal was accepted.
bool update_eta(ModelState& state, const GeneNetwork& active, const Hyperparameters& hp,
                double step_sd, const CftpSettings& cftp, EtaAuxiliary& aux, Rng& rng);

// ---------------------------------------------------------------------------
// survival-data augmentation
// ---------------------------------------------------------------------------

// Draw from a univariate Student-t(location, scale, df) truncated to
// (lower, +inf), by inversion of the upper tail.
double sample_truncated_t_lower(double location, double scale, double df, double lower, Rng& rng);

// One sweep of the latent log survival times: observed events stay clamped at
// log(time); each censored entry is redrawn from its full conditional under
// the marginalized multivariate-t likelihood, truncated below at log(time).
Vector augment_aft(const ModelState& state, const Dataset& data, const ScoreMatrix& scores,
                   const Hyperparameters& hp, Rng& rng);

// ---------------------------------------------------------------------------
// full chain
// ---------------------------------------------------------------------------

struct RunSettings {
  std::int64_t iterations = 300000;
  std::int64_t burn_in = 50000;
  int eta_update_every = 1;        // an eta step every this many iterations; 0 disables
  int init_pathways = 2;           // random pathway/gene pairs added at initialization
  double eta_step_fraction = 0.1;  // proposal sd = fraction * eta_pt
  std::uint64_t cftp_t_max = std::uint64_t{1} << 20;
  EdgeRule edge_rule = EdgeRule::union_membership;
  std::uint64_t seed = 0;
  std::optional<double> eta_init;  // default: drawn from the eta prior
  std::int64_t checkpoint_every = 0;  // iterations between checkpoints; 0 disables
  std::string checkpoint_path;
  std::string resume_from;  // checkpoint file to resume from (optional)
};

// Full per-iteration trace.  Indicator vectors are bit-packed row-major
// (theta_words / gamma_words 64-bit words per record).
struct ChainTrace {
  int n_pathways = 0;
  int n_genes = 0;
  std::int64_t burn_in = 0;
  std::uint64_t seed = 0;
  int theta_words = 0;
  int gamma_words = 0;
  std::vector<std::int64_t> iteration;
  std::vector<std::uint64_t> theta_bits;
  std::vector<std::uint64_t> gamma_bits;
  std::vector<double> eta;
  std::vector<double> log_posterior;  // log lik + log prior(theta,gamma) + log prior(eta)
  std::vector<int> k_theta;
  std::vector<int> n_selected;

  // diagnostics
  std::int64_t move_proposals = 0;
  std::int64_t move_accepts = 0;
  std::int64_t eta_proposals = 0;
  std::int64_t eta_accepts = 0;
  std::int64_t cftp_failures = 0;

  std::int64_t n_records() const { return static_cast<std::int64_t>(iteration.size()); }
  BinaryVector theta_at(std::int64_t record) const;
  BinaryVector gamma_at(std::int64_t record) const;
  bool is_post_burn_in(std::int64_t record) const { return iteration[record] >= burn_in; }
};

ChainTrace run_chain(const Dataset& data, const PathwayMembership& membership,
                     const GeneNetwork& network, const Hyperparameters& hp,
                     const RunSettings& settings);

// Runs n_chains chains on separate threads; chain c uses RNG stream c derived
// from settings.seed.  Results are returned in chain order.
std::vector<ChainTrace> run_chains(const Dataset& data, const PathwayMembership& membership,
                                   const GeneNetwork& network, const Hyperparameters& hp,
                                   const RunSettings& settings, int n_chains);

// ---------------------------------------------------------------------------
// checkpoints
// ---------------------------------------------------------------------------

struct Checkpoint {
  std::int64_t iteration = -1;  // last completed iteration
  ModelState state;
  EtaAuxiliary aux;
  std::string rng_state;  // serialized mt19937_64
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path, int n_pathways, int n_genes);

}  // namespace pathsel
