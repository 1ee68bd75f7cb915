// pathsel: batch front end for Bayesian pathway and gene selection.
//
// Subcommands
//   simulate   generate a synthetic structure and dataset (plus ground truth)
//   scan-eta   locate the MRF phase transition on an eta grid
//   fit        run MCMC chains and write traces plus posterior summaries
//   report     recompute posterior summaries from saved states files
//   predict    threshold a fit into a model and predict a test set
//
// Every subcommand accepts --config FILE with key=value lines under a
// [command] section (keys are the long option names); command-line flags
// override the file.  The default output directory is $PATHSEL_OUT when set.
// Exit codes: 0 success, 2 bad flags or configuration, 3 invalid data,
// 4 I/O failure, 1 anything else.

#include "pathsel/common.hpp"
#include "pathsel/dataset.hpp"
#include "pathsel/hyperparameters.hpp"
#include "pathsel/inference.hpp"
#include "pathsel/membership.hpp"
#include "pathsel/mrf_sim.hpp"
#include "pathsel/network.hpp"
#include "pathsel/sampler.hpp"
#include "pathsel/simgen.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace pathsel;

constexpr const char* kVersion = "0.1.0";

// Configuration problems detected after flag parsing (bad value combinations,
// hyperparameter constraints); mapped to the same exit code as flag errors.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  const char* env = std::getenv("PATHSEL_OUT");
  return (env != nullptr && *env != '\0') ? std::string(env) : std::string("pathsel_out");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

void require_readable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
}

// Resolved configuration + provenance, written next to the outputs.  The
// [command] section plus key=value lines form a valid --config file, so a run
// can be repeated with
//   pathsel <command> --config <out>/run_meta.txt
// Only explicitly given options become live lines (their original argument
// strings, hence exact); options left at their defaults are recorded as
// comments, so a replay re-derives them from the binary instead of a possibly
// rounded printout.
void write_run_meta(const std::string& out_dir, const CLI::App& cmd, double wall_seconds) {
  const std::string path = out_dir + "/run_meta.txt";
  auto out = open_output(path);
  out << "# pathsel " << kVersion << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", wall_seconds);
  out << "# wall_time_seconds: " << buf << "\n";
  out << "[" << cmd.get_name() << "]\n";
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames()[0];
    if (name == "help" || name == "config" || name == "version") continue;
    const std::vector<std::string> values = opt->results();
    for (const std::string& v : values) {
      const bool quote = v.find_first_of(" \t#") != std::string::npos;
      out << name << '=' << (quote ? "\"" + v + "\"" : v) << "\n";
    }
    if (values.empty() && !opt->get_default_str().empty())
      out << "# " << name << '=' << opt->get_default_str() << " (default)\n";
  }
  finish_output(out, path);
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return grid;
}

// ---------------------------------------------------------------------------
// shared: rebuilding chain traces from states files
// ---------------------------------------------------------------------------

void pack_record(const BinaryVector& bits, int words, std::vector<std::uint64_t>& out) {
  const std::size_t base = out.size();
  out.resize(base + static_cast<std::size_t>(words), 0);
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (bits[j]) out[base + j / 64] |= std::uint64_t{1} << (j % 64);
}

ChainTrace load_trace_from_states(const std::string& path, const PathwayMembership& membership,
                                  std::int64_t burn_in) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty states file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "iteration,theta_hex,gamma_hex,eta,log_posterior")
    throw DataError(path + ": unexpected header '" + line + "'");

  ChainTrace trace;
  trace.n_pathways = membership.n_pathways;
  trace.n_genes = membership.n_genes;
  trace.burn_in = burn_in;
  trace.theta_words = (membership.n_pathways + 63) / 64;
  trace.gamma_words = (membership.n_genes + 63) / 64;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw DataError(where + ": expected 5 fields");
    try {
      trace.iteration.push_back(std::stoll(fields[0]));
      const BinaryVector theta = from_hex(fields[1], membership.n_pathways);
      const BinaryVector gamma = from_hex(fields[2], membership.n_genes);
      pack_record(theta, trace.theta_words, trace.theta_bits);
      pack_record(gamma, trace.gamma_words, trace.gamma_bits);
      trace.k_theta.push_back(popcount(theta));
      trace.n_selected.push_back(popcount(gamma));
      trace.eta.push_back(std::stod(fields[3]));
      trace.log_posterior.push_back(std::stod(fields[4]));
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  if (trace.n_records() == 0) throw DataError(path + ": no state rows");
  return trace;
}

std::vector<ChainTrace> load_traces(const std::vector<std::string>& paths,
                                    const PathwayMembership& membership, std::int64_t burn_in) {
  std::vector<ChainTrace> traces;
  traces.reserve(paths.size());
  for (const auto& p : paths) traces.push_back(load_trace_from_states(p, membership, burn_in));
  return traces;
}

std::int64_t pooled_post_burn_in(const std::vector<ChainTrace>& traces) {
  std::int64_t total = 0;
  for (const auto& t : traces)
    for (std::int64_t r = 0; r < t.n_records(); ++r)
      if (t.is_post_burn_in(r)) ++total;
  return total;
}

// Records kept every `every`-th row; estimators always use the full trace,
// thinning only reduces what is written to disk.
ChainTrace thin_trace(const ChainTrace& trace, int every) {
  if (every <= 1) return trace;
  ChainTrace out;
  out.n_pathways = trace.n_pathways;
  out.n_genes = trace.n_genes;
  out.burn_in = trace.burn_in;
  out.seed = trace.seed;
  out.theta_words = trace.theta_words;
  out.gamma_words = trace.gamma_words;
  out.move_proposals = trace.move_proposals;
  out.move_accepts = trace.move_accepts;
  out.eta_proposals = trace.eta_proposals;
  out.eta_accepts = trace.eta_accepts;
  out.cftp_failures = trace.cftp_failures;
  for (std::int64_t r = 0; r < trace.n_records(); ++r) {
    if (r % every != 0) continue;
    out.iteration.push_back(trace.iteration[static_cast<std::size_t>(r)]);
    out.eta.push_back(trace.eta[static_cast<std::size_t>(r)]);
    out.log_posterior.push_back(trace.log_posterior[static_cast<std::size_t>(r)]);
    out.k_theta.push_back(trace.k_theta[static_cast<std::size_t>(r)]);
    out.n_selected.push_back(trace.n_selected[static_cast<std::size_t>(r)]);
    for (int w = 0; w < trace.theta_words; ++w)
      out.theta_bits.push_back(
          trace.theta_bits[static_cast<std::size_t>(r) * trace.theta_words + w]);
    for (int w = 0; w < trace.gamma_words; ++w)
      out.gamma_bits.push_back(
          trace.gamma_bits[static_cast<std::size_t>(r) * trace.gamma_words + w]);
  }
  return out;
}

// Pathway set the gene conditionals are computed against: the thresholded
// pathways, or the single highest-marginal pathway when none passes.
std::vector<int> conditional_pathway_set(const Selection& selection, const Vector& marginals) {
  std::vector<int> set;
  for (int k = 0; k < static_cast<int>(selection.theta.size()); ++k)
    if (selection.theta[k]) set.push_back(k);
  if (set.empty()) {
    int best = 0;
    for (int k = 1; k < marginals.size(); ++k)
      if (marginals[k] > marginals[best]) best = k;
    set.push_back(best);
  }
  return set;
}

void write_selection_csv(const std::string& path, const PathwayMembership& membership,
                         const Selection& selection) {
  auto out = open_output(path);
  out << "kind,id\n";
  for (int k = 0; k < membership.n_pathways; ++k)
    if (selection.theta[k]) out << "pathway," << membership.pathway_ids[k] << "\n";
  for (int j = 0; j < membership.n_genes; ++j)
    if (selection.gamma[j]) out << "gene," << membership.gene_ids[j] << "\n";
  finish_output(out, path);
}

// Summary CSVs shared by `fit` and `report`.
void write_posterior_summaries(const std::string& out_dir, const PathwayMembership& membership,
                               const std::vector<ChainTrace>& traces, double pathway_threshold,
                               double gene_threshold, int max_models) {
  const Vector marginals = pathway_marginals(traces);
  {
    auto out = open_output(out_dir + "/pathway_marginals.csv");
    write_pathway_marginals_csv(out, membership, marginals);
    finish_output(out, out_dir + "/pathway_marginals.csv");
  }
  const Selection selection =
      threshold_selection(traces, membership, pathway_threshold, gene_threshold);
  {
    const auto set = conditional_pathway_set(selection, marginals);
    const GeneConditionals cond = gene_conditionals(traces, membership, set);
    auto out = open_output(out_dir + "/gene_conditionals.csv");
    write_gene_conditionals_csv(out, membership, cond);
    finish_output(out, out_dir + "/gene_conditionals.csv");
  }
  {
    const auto models = top_models(traces, max_models);
    auto out = open_output(out_dir + "/models.csv");
    write_models_csv(out, models, pooled_post_burn_in(traces));
    finish_output(out, out_dir + "/models.csv");
  }
  write_selection_csv(out_dir + "/selection.csv", membership, selection);
  std::cout << "selection: " << popcount(selection.theta) << " pathways, "
            << popcount(selection.gamma) << " genes\n";
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string out = default_out_dir();
  std::uint64_t seed = 1;
  std::string membership_path;
  std::string network_path;
  StructureConfig structure;
  SimConfig sim;
  double censor_fraction = 0.0;
};

int run_simulate(const SimulateArgs& args) {
  if (args.censor_fraction < 0.0 || args.censor_fraction >= 1.0)
    throw ConfigError("--censor-fraction must lie in [0, 1)");
  if (!(args.sim.rho > -1.0 && args.sim.rho < 1.0))
    throw ConfigError("--rho must lie in (-1, 1)");
  if (args.sim.n_samples < 2) throw ConfigError("--samples must be at least 2");

  Rng rng = make_rng(args.seed, 0);
  PathwayMembership membership;
  GeneNetwork network;
  if (!args.membership_path.empty()) {
    require_readable(args.membership_path);
    require_readable(args.network_path);
    membership = load_membership(args.membership_path);
    network = load_network(args.network_path, membership);
  } else {
    auto structure = random_structure(args.structure, rng);
    membership = std::move(structure.first);
    network = std::move(structure.second);
  }

  SimTruth truth = select_truth(membership, network, args.sim, rng);
  truth.seed = args.seed;
  SimData data = generate(membership, network, truth, args.sim, rng);
  std::vector<std::uint8_t> delta;
  if (args.censor_fraction > 0.0)
    apply_random_censoring(data.response, delta, args.censor_fraction, rng);

  ensure_dir(args.out);
  write_simulation(args.out, membership, network, data, truth, delta);
  std::cout << "simulate: " << membership.n_pathways << " pathways, " << membership.n_genes
            << " genes, " << network.n_edges << " edges, " << data.response.size() << " samples ("
            << truth.true_genes.size() << " true genes in " << truth.true_pathways.size()
            << " pathways)\n"
            << "wrote membership.txt network.txt expression.csv response.csv truth.csv to "
            << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// scan-eta
// ---------------------------------------------------------------------------

struct ScanArgs {
  std::string out = default_out_dir();
  std::string membership_path;
  std::string network_path;
  double mu = -3.5;
  double eta_min = 0.0;
  double eta_max = 0.2;
  int points = 21;
  int sweeps = 2000;
  std::uint64_t seed = 1;
};

int run_scan(const ScanArgs& args) {
  if (args.points < 2) throw ConfigError("--points must be at least 2");
  if (!(args.eta_min >= 0.0)) throw ConfigError("--eta-min must be nonnegative");
  if (!(args.eta_max > args.eta_min)) throw ConfigError("--eta-max must exceed --eta-min");
  if (args.sweeps < 8) throw ConfigError("--sweeps must be at least 8");

  require_readable(args.membership_path);
  require_readable(args.network_path);
  const PathwayMembership membership = load_membership(args.membership_path);
  const GeneNetwork network = load_network(args.network_path, membership);

  Rng rng = make_rng(args.seed, 0);
  const GridScanResult result =
      phase_transition_scan(network, args.mu, linspace(args.eta_min, args.eta_max, args.points),
                            args.sweeps, rng);

  ensure_dir(args.out);
  const std::string path = args.out + "/eta_scan.csv";
  auto out = open_output(path);
  write_grid_scan_csv(result, out);
  finish_output(out, path);

  if (result.eta_pt_estimate)
    std::cout << "scan-eta: steepest rise at eta = " << *result.eta_pt_estimate << "\n";
  else
    std::cout << "scan-eta: no detectable transition on this grid\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
  std::string out = default_out_dir();
  std::string membership_path;
  std::string network_path;
  std::string expression_path;
  std::string response_path;
  std::string outcome;  // "", "continuous", "survival"
  Hyperparameters hp;
  RunSettings settings;
  int chains = 1;
  int thin = 1;
  std::string edge_rule = "union";
  double pathway_threshold = 0.5;
  double gene_threshold = 0.5;
  int max_models = 50;
  std::int64_t checkpoint_every = 0;
  std::string resume;
};

int run_fit(const FitArgs& args_in) {
  FitArgs args = args_in;
  try {
    args.hp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (args.settings.iterations <= args.settings.burn_in)
    throw ConfigError("--iterations must exceed --burn-in");
  if (args.settings.burn_in < 0) throw ConfigError("--burn-in must be nonnegative");
  if (args.chains < 1) throw ConfigError("--chains must be at least 1");
  if (args.thin < 1) throw ConfigError("--thin must be at least 1");
  if (args.settings.eta_update_every < 0) throw ConfigError("--eta-update-every must be >= 0");
  if (args.settings.init_pathways < 1) throw ConfigError("--init-pathways must be at least 1");
  if (!(args.settings.eta_step_fraction > 0))
    throw ConfigError("--eta-step-fraction must be positive");
  if (args.settings.eta_init && (*args.settings.eta_init < 0 || *args.settings.eta_init > args.hp.eta_pt))
    throw ConfigError("--eta-init must lie in [0, eta-pt]");
  if (args.edge_rule == "union") args.settings.edge_rule = EdgeRule::union_membership;
  else if (args.edge_rule == "shared") args.settings.edge_rule = EdgeRule::shared_pathway;
  else throw ConfigError("--edge-rule must be 'union' or 'shared'");
  if (!args.outcome.empty() && args.outcome != "continuous" && args.outcome != "survival")
    throw ConfigError("--outcome must be 'continuous' or 'survival'");

  require_readable(args.membership_path);
  require_readable(args.network_path);
  require_readable(args.expression_path);
  require_readable(args.response_path);
  const PathwayMembership membership = load_membership(args.membership_path);
  const GeneNetwork network = load_network(args.network_path, membership);
  const Dataset data = load_dataset(args.expression_path, args.response_path, membership);

  if (!args.outcome.empty()) {
    const bool survival = data.outcome_kind == OutcomeKind::survival;
    if (survival != (args.outcome == "survival"))
      throw DataError(survival
                          ? "--outcome continuous, but the response file has a delta column"
                          : "--outcome survival requires a delta column in the response file");
  }

  ensure_dir(args.out);
  args.settings.checkpoint_every = args.checkpoint_every;
  if (args.checkpoint_every > 0) args.settings.checkpoint_path = args.out + "/checkpoint";
  args.settings.resume_from = args.resume;
  if (!args.resume.empty())
    for (int c = 0; c < args.chains; ++c) require_readable(args.resume + "." + std::to_string(c));

  std::cout << "fit: " << args.chains << " chain(s) x " << args.settings.iterations
            << " iterations (burn-in " << args.settings.burn_in << ") on " << data.n_samples
            << " samples, " << membership.n_pathways << " pathways, " << membership.n_genes
            << " genes"
            << (data.outcome_kind == OutcomeKind::survival ? ", survival outcome" : "") << "\n";
  std::cout.flush();

  const std::vector<ChainTrace> traces =
      run_chains(data, membership, network, args.hp, args.settings, args.chains);

  for (int c = 0; c < args.chains; ++c) {
    const ChainTrace& t = traces[static_cast<std::size_t>(c)];
    const double move_rate = t.move_proposals > 0
                                 ? static_cast<double>(t.move_accepts) / t.move_proposals
                                 : 0.0;
    std::cout << "chain " << c << ": move accept " << move_rate;
    if (t.eta_proposals > 0)
      std::cout << ", eta accept " << static_cast<double>(t.eta_accepts) / t.eta_proposals
                << ", cftp failures " << t.cftp_failures;
    std::cout << "\n";

    const ChainTrace thinned = thin_trace(t, args.thin);
    const std::string suffix = "." + std::to_string(c) + ".csv";
    {
      const std::string path = args.out + "/trace" + suffix;
      auto out = open_output(path);
      write_trace_csv(out, thinned);
      finish_output(out, path);
    }
    {
      const std::string path = args.out + "/states" + suffix;
      auto out = open_output(path);
      write_states_csv(out, thinned);
      finish_output(out, path);
    }
  }

  if (args.chains > 1) {
    double min_corr = 1.0;
    bool any = false, undefined = false;
    for (std::size_t a = 0; a < traces.size(); ++a)
      for (std::size_t b = a + 1; b < traces.size(); ++b) {
        const auto corr = chain_concordance(traces[a], traces[b]);
        if (corr) {
          min_corr = std::min(min_corr, *corr);
          any = true;
        } else {
          undefined = true;
        }
      }
    if (any) std::cout << "chain concordance (min pairwise): " << min_corr << "\n";
    if (undefined) std::cout << "chain concordance undefined for at least one pair (zero variance)\n";
  }

  write_posterior_summaries(args.out, membership, traces, args.pathway_threshold,
                            args.gene_threshold, args.max_models);
  std::cout << "wrote traces and summaries to " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string out = default_out_dir();
  std::string membership_path;
  std::vector<std::string> states_paths;
  std::int64_t burn_in = 0;
  double pathway_threshold = 0.5;
  double gene_threshold = 0.5;
  int max_models = 50;
};

int run_report(const ReportArgs& args) {
  if (args.burn_in < 0) throw ConfigError("--burn-in must be nonnegative");
  require_readable(args.membership_path);
  const PathwayMembership membership = load_membership(args.membership_path);
  const std::vector<ChainTrace> traces = load_traces(args.states_paths, membership, args.burn_in);
  if (pooled_post_burn_in(traces) == 0)
    throw DataError("no post-burn-in records in the given states files");
  ensure_dir(args.out);
  write_posterior_summaries(args.out, membership, traces, args.pathway_threshold,
                            args.gene_threshold, args.max_models);
  std::cout << "wrote summaries to " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string out = default_out_dir();
  std::string membership_path;
  std::vector<std::string> states_paths;
  std::int64_t burn_in = 0;
  std::string expression_path;
  std::string response_path;
  std::string test_expression_path;
  std::string test_response_path;
  double pathway_threshold = 0.5;
  double gene_threshold = 0.5;
  double h = 0.02;
};

int run_predict(const PredictArgs& args) {
  if (args.burn_in < 0) throw ConfigError("--burn-in must be nonnegative");
  if (!(args.h > 0)) throw ConfigError("--h must be positive");
  require_readable(args.membership_path);
  require_readable(args.expression_path);
  require_readable(args.response_path);
  require_readable(args.test_expression_path);
  if (!args.test_response_path.empty()) require_readable(args.test_response_path);

  const PathwayMembership membership = load_membership(args.membership_path);
  const std::vector<ChainTrace> traces = load_traces(args.states_paths, membership, args.burn_in);
  const Selection selection =
      threshold_selection(traces, membership, args.pathway_threshold, args.gene_threshold);
  std::cout << "predict: selection has " << popcount(selection.theta) << " pathways, "
            << popcount(selection.gamma) << " genes\n";

  const Dataset train = load_dataset(args.expression_path, args.response_path, membership);
  Dataset test;
  if (!args.test_response_path.empty()) {
    test = load_dataset(args.test_expression_path, args.test_response_path, membership);
  } else {
    // No test response: wrap the expression table with a placeholder response
    // (prediction never reads it).
    ExpressionTable table = load_expression(args.test_expression_path, membership);
    test = make_dataset(std::move(table.sample_ids), table.values,
                        Vector::Zero(table.values.rows()), {}, OutcomeKind::continuous);
  }

  Hyperparameters hp;
  hp.h = args.h;
  const Vector predicted = predict(train, test, membership, selection, hp);

  ensure_dir(args.out);
  const std::string path = args.out + "/predictions.csv";
  auto out = open_output(path);
  write_predictions_csv(out, test.sample_ids, predicted);
  finish_output(out, path);
  std::cout << "wrote " << path << "\n";

  if (!args.test_response_path.empty()) {
    const double mse = prediction_mse(predicted, test);
    std::cout << "test mse"
              << (test.outcome_kind == OutcomeKind::survival ? " (log-time, observed events)" : "")
              << ": " << mse << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// flag wiring
// ---------------------------------------------------------------------------

void add_common_output(CLI::App* cmd, std::string& out, std::uint64_t* seed) {
  // --help only: the -h short form would collide with the --h variance flag.
  cmd->set_help_flag("--help", "Print this help message and exit");
  cmd->add_option("--out", out, "Output directory (default: $PATHSEL_OUT or ./pathsel_out)");
  if (seed != nullptr) cmd->add_option("--seed", *seed, "RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian joint pathway and gene selection"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  // fallthrough lets subcommands forward --config to this app, where the
  // file is actually processed ([command] sections route values back down)
  app.fallthrough();
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "",
                 "key=value configuration file under a [command] section; flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "Generate a synthetic structure and dataset");
  add_common_output(c_sim, sim.out, &sim.seed);
  c_sim->add_option("--membership", sim.membership_path,
                    "Existing pathway membership file (omit to generate a structure)");
  c_sim->add_option("--network", sim.network_path, "Existing gene network file")
      ->needs(c_sim->get_option("--membership"));
  c_sim->get_option("--membership")->needs(c_sim->get_option("--network"));
  c_sim->add_option("--pathways", sim.structure.n_pathways, "Generated structure: pathway count");
  c_sim->add_option("--genes-min", sim.structure.genes_per_pathway_min, "Min genes per pathway");
  c_sim->add_option("--genes-max", sim.structure.genes_per_pathway_max, "Max genes per pathway");
  c_sim->add_option("--overlap", sim.structure.overlap_fraction,
                    "Fraction of each pathway reusing existing genes");
  c_sim->add_option("--extra-edges", sim.structure.extra_edge_rate,
                    "Extra in-pathway edges per member beyond the spanning tree");
  c_sim->add_option("--samples", sim.sim.n_samples, "Sample count");
  c_sim->add_option("--true-pathways", sim.sim.n_true_pathways, "Number of outcome-related pathways");
  c_sim->add_option("--beta", sim.sim.beta_magnitude, "Effect magnitude |beta|");
  c_sim->add_option("--rho", sim.sim.rho, "Parent-child regression weight");
  c_sim->add_option("--noise-sd", sim.sim.noise_sd, "Response noise standard deviation");
  c_sim->add_flag("--average-parents", sim.sim.average_parents,
                  "Children regress on the mean of their parents instead of the sum");
  c_sim->add_option("--censor-fraction", sim.censor_fraction,
                    "Random right-censoring fraction; > 0 emits a survival response");

  ScanArgs scan;
  CLI::App* c_scan = app.add_subcommand("scan-eta", "Locate the MRF phase transition on a grid");
  add_common_output(c_scan, scan.out, &scan.seed);
  c_scan->add_option("--membership", scan.membership_path, "Pathway membership file")->required();
  c_scan->add_option("--network", scan.network_path, "Gene network file")->required();
  c_scan->add_option("--mu", scan.mu, "MRF sparsity offset");
  c_scan->add_option("--eta-min", scan.eta_min, "Grid start");
  c_scan->add_option("--eta-max", scan.eta_max, "Grid end");
  c_scan->add_option("--points", scan.points, "Grid points");
  c_scan->add_option("--sweeps", scan.sweeps, "Gibbs sweeps per grid point");

  FitArgs fit;
  CLI::App* c_fit = app.add_subcommand("fit", "Run MCMC and write traces plus posterior summaries");
  add_common_output(c_fit, fit.out, &fit.settings.seed);
  c_fit->add_option("--membership", fit.membership_path, "Pathway membership file")->required();
  c_fit->add_option("--network", fit.network_path, "Gene network file")->required();
  c_fit->add_option("--expression", fit.expression_path, "Expression matrix file")->required();
  c_fit->add_option("--response", fit.response_path, "Response file")->required();
  c_fit->add_option("--outcome", fit.outcome,
                    "Expected outcome kind {continuous|survival}; checked against the response file");
  c_fit->add_option("--iterations", fit.settings.iterations, "MCMC iterations per chain");
  c_fit->add_option("--burn-in", fit.settings.burn_in, "Burn-in iterations excluded from estimators");
  c_fit->add_option("--chains", fit.chains, "Independent chains (run concurrently)");
  c_fit->add_option("--thin", fit.thin, "Keep every k-th record in trace/states files");
  c_fit->add_option("--h0", fit.hp.h0, "Intercept relative prior variance");
  c_fit->add_option("--alpha0", fit.hp.alpha0, "Intercept prior mean");
  c_fit->add_option("--beta0", fit.hp.beta0, "Score coefficient prior mean");
  c_fit->add_option("--nu0", fit.hp.nu0, "Variance prior degrees of freedom");
  c_fit->add_option("--sigma0-sq", fit.hp.sigma0_sq, "Variance prior scale");
  c_fit->add_option("--h", fit.hp.h, "Score coefficient relative prior variance");
  c_fit->add_option("--phi-star", fit.hp.phi_star, "Prior pathway inclusion probability");
  c_fit->add_option("--mu", fit.hp.mu_mrf, "MRF sparsity offset");
  c_fit->add_option("--eta-pt", fit.hp.eta_pt, "Upper bound of the eta prior (phase transition)");
  c_fit->add_option("--c0", fit.hp.c0, "Beta shape 1 of the eta prior");
  c_fit->add_option("--d0", fit.hp.d0, "Beta shape 2 of the eta prior");
  c_fit->add_option("--eta-update-every", fit.settings.eta_update_every,
                    "Iterations between eta updates (0 disables eta sampling)");
  c_fit->add_option("--eta-step-fraction", fit.settings.eta_step_fraction,
                    "eta proposal sd as a fraction of eta-pt");
  c_fit->add_option("--eta-init", fit.settings.eta_init,
                    "Initial eta (default: drawn from the prior)");
  c_fit->add_option("--init-pathways", fit.settings.init_pathways,
                    "Pathway/gene pairs added at initialization");
  c_fit->add_option("--cftp-max", fit.settings.cftp_t_max,
                    "Cap on coupling-from-the-past sweeps");
  c_fit->add_option("--edge-rule", fit.edge_rule,
                    "Active network restriction {union|shared}");
  c_fit->add_option("--pathway-threshold", fit.pathway_threshold,
                    "Marginal probability cut for selecting pathways");
  c_fit->add_option("--gene-threshold", fit.gene_threshold,
                    "Conditional probability cut for selecting genes");
  c_fit->add_option("--max-models", fit.max_models, "Rows in models.csv");
  c_fit->add_option("--checkpoint-every", fit.checkpoint_every,
                    "Iterations between checkpoints (0 disables)");
  c_fit->add_option("--resume", fit.resume,
                    "Checkpoint path prefix to resume from (per-chain suffix .<chain> is appended)");

  ReportArgs report;
  CLI::App* c_report = app.add_subcommand("report", "Recompute posterior summaries from states files");
  add_common_output(c_report, report.out, nullptr);
  c_report->add_option("--membership", report.membership_path, "Pathway membership file")->required();
  c_report->add_option("--states", report.states_paths, "states.csv files (repeatable)")->required();
  c_report->add_option("--burn-in", report.burn_in, "Iterations below this count are excluded");
  c_report->add_option("--pathway-threshold", report.pathway_threshold,
                       "Marginal probability cut for selecting pathways");
  c_report->add_option("--gene-threshold", report.gene_threshold,
                       "Conditional probability cut for selecting genes");
  c_report->add_option("--max-models", report.max_models, "Rows in models.csv");

  PredictArgs predict_args;
  CLI::App* c_predict = app.add_subcommand("predict", "Threshold a fit and predict a test set");
  add_common_output(c_predict, predict_args.out, nullptr);
  c_predict->add_option("--membership", predict_args.membership_path, "Pathway membership file")
      ->required();
  c_predict->add_option("--states", predict_args.states_paths, "states.csv files (repeatable)")
      ->required();
  c_predict->add_option("--burn-in", predict_args.burn_in,
                        "Iterations below this count are excluded");
  c_predict->add_option("--expression", predict_args.expression_path, "Training expression file")
      ->required();
  c_predict->add_option("--response", predict_args.response_path, "Training response file")
      ->required();
  c_predict->add_option("--test-expression", predict_args.test_expression_path,
                        "Test expression file")
      ->required();
  c_predict->add_option("--test-response", predict_args.test_response_path,
                        "Test response file (optional; enables MSE)");
  c_predict->add_option("--pathway-threshold", predict_args.pathway_threshold,
                        "Marginal probability cut for selecting pathways");
  c_predict->add_option("--gene-threshold", predict_args.gene_threshold,
                        "Conditional probability cut for selecting genes");
  c_predict->add_option("--h", predict_args.h, "Ridge relative variance used for prediction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto started = std::chrono::steady_clock::now();
  CLI::App* active = nullptr;
  int status = 0;
  try {
    if (c_sim->parsed()) {
      active = c_sim;
      status = run_simulate(sim);
    } else if (c_scan->parsed()) {
      active = c_scan;
      status = run_scan(scan);
    } else if (c_fit->parsed()) {
      active = c_fit;
      status = run_fit(fit);
    } else if (c_report->parsed()) {
      active = c_report;
      status = run_report(report);
    } else if (c_predict->parsed()) {
      active = c_predict;
      status = run_predict(predict_args);
    }
    if (status == 0 && active != nullptr) {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      std::string out_dir;
      if (active == c_sim) out_dir = sim.out;
      else if (active == c_scan) out_dir = scan.out;
      else if (active == c_fit) out_dir = fit.out;
      else if (active == c_report) out_dir = report.out;
      else out_dir = predict_args.out;
      write_run_meta(out_dir, *active, wall);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
