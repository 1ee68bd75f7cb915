#include "pathsel/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace pathsel {

namespace {

std::vector<int> sample_without_replacement(int n, int k, Rng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

void write_line(std::ofstream& out, const std::string& line, const std::string& path) {
  out << line << '\n';
  if (!out) throw DataError("failed writing " + path);
}

}  // namespace

SimTruth select_truth(const PathwayMembership& membership, const GeneNetwork& network,
                      const SimConfig& config, Rng& rng) {
  if (config.n_true_pathways < 1 || config.n_true_pathways > membership.n_pathways)
    throw std::invalid_argument("select_truth: n_true_pathways out of range");
  if (network.n_genes != membership.n_genes)
    throw std::invalid_argument("select_truth: network/membership gene count mismatch");

  SimTruth truth;
  truth.rho = config.rho;
  truth.true_pathways = sample_without_replacement(membership.n_pathways,
                                                   config.n_true_pathways, rng);
  std::sort(truth.true_pathways.begin(), truth.true_pathways.end());

  std::vector<std::uint8_t> in_union(static_cast<std::size_t>(membership.n_genes), 0);
  for (int k : truth.true_pathways)
    for (int j : membership.genes_in_pathway[k]) in_union[static_cast<std::size_t>(j)] = 1;

  // Gene -> signed beta; the first true pathway that reaches a gene wins.
  std::vector<double> beta_of(static_cast<std::size_t>(membership.n_genes), 0.0);
  std::vector<std::uint8_t> picked(static_cast<std::size_t>(membership.n_genes), 0);
  double sign = 1.0;
  for (int k : truth.true_pathways) {
    const auto& members = membership.genes_in_pathway[k];
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const int seed_gene = members[pick(rng)];
    std::vector<int> genes{seed_gene};
    for (int nb : network.neighbors[seed_gene])
      if (in_union[static_cast<std::size_t>(nb)]) genes.push_back(nb);
    for (int j : genes) {
      if (picked[static_cast<std::size_t>(j)]) continue;
      picked[static_cast<std::size_t>(j)] = 1;
      beta_of[static_cast<std::size_t>(j)] = sign * config.beta_magnitude;
    }
    sign = -sign;
  }

  for (int j = 0; j < membership.n_genes; ++j) {
    if (!picked[static_cast<std::size_t>(j)]) continue;
    truth.true_genes.push_back(j);
    truth.beta.push_back(beta_of[static_cast<std::size_t>(j)]);
  }
  return truth;
}

SimData generate(const PathwayMembership& membership, const GeneNetwork& network,
                 const SimTruth& truth, const SimConfig& config, Rng& rng) {
  const int n = config.n_samples;
  const int p = membership.n_genes;
  if (n < 2) throw std::invalid_argument("generate: need at least two samples");
  if (network.n_genes != p)
    throw std::invalid_argument("generate: network/membership gene count mismatch");

  std::vector<std::uint8_t> is_true(static_cast<std::size_t>(p), 0);
  for (int j : truth.true_genes) is_true[static_cast<std::size_t>(j)] = 1;

  // Breadth-first orientation of the network restricted to the true genes.
  // Roots (in gene order) start new components; an edge points from the
  // earlier-discovered endpoint to the later one, and between equal depths
  // from the smaller gene index to the larger.
  std::vector<int> depth(static_cast<std::size_t>(p), -1);
  std::vector<int> order;  // true genes in generation order
  std::vector<std::vector<int>> parents(static_cast<std::size_t>(p));
  for (int root : truth.true_genes) {
    if (depth[static_cast<std::size_t>(root)] >= 0) continue;
    depth[static_cast<std::size_t>(root)] = 0;
    std::deque<int> frontier{root};
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop_front();
      order.push_back(u);
      for (int v : network.neighbors[u]) {
        if (!is_true[static_cast<std::size_t>(v)]) continue;
        if (depth[static_cast<std::size_t>(v)] < 0) {
          depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
          parents[static_cast<std::size_t>(v)].push_back(u);
          frontier.push_back(v);
        } else if (depth[static_cast<std::size_t>(v)] == depth[static_cast<std::size_t>(u)] + 1) {
          parents[static_cast<std::size_t>(v)].push_back(u);
        } else if (depth[static_cast<std::size_t>(v)] == depth[static_cast<std::size_t>(u)] && u < v) {
          parents[static_cast<std::size_t>(v)].push_back(u);
        }
      }
    }
  }
  // Same-depth edges can put a parent after its child in BFS order; generate
  // in a topological order instead (parents all have smaller (depth, index)).
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (depth[static_cast<std::size_t>(a)] != depth[static_cast<std::size_t>(b)])
      return depth[static_cast<std::size_t>(a)] < depth[static_cast<std::size_t>(b)];
    return a < b;
  });

  std::normal_distribution<double> unit_normal(0.0, 1.0);
  SimData data;
  data.expression = Matrix(n, p);

  std::vector<std::uint8_t> generated(static_cast<std::size_t>(p), 0);
  for (int j : order) {
    Vector col(n);
    const auto& par = parents[static_cast<std::size_t>(j)];
    if (par.empty()) {
      for (int i = 0; i < n; ++i) col[i] = unit_normal(rng);
    } else {
      Vector mean = Vector::Zero(n);
      for (int q : par) mean += data.expression.col(q);
      if (config.average_parents) mean /= static_cast<double>(par.size());
      for (int i = 0; i < n; ++i) col[i] = truth.rho * mean[i] + unit_normal(rng);
    }
    data.expression.col(j) = col;
    generated[static_cast<std::size_t>(j)] = 1;
  }
  for (int j = 0; j < p; ++j) {
    if (generated[static_cast<std::size_t>(j)]) continue;
    for (int i = 0; i < n; ++i) data.expression(i, j) = unit_normal(rng);
  }

  data.response = Vector::Zero(n);
  for (std::size_t g = 0; g < truth.true_genes.size(); ++g)
    data.response += truth.beta[g] * data.expression.col(truth.true_genes[g]);
  for (int i = 0; i < n; ++i) data.response[i] += config.noise_sd * unit_normal(rng);
  return data;
}

void apply_random_censoring(Vector& response, std::vector<std::uint8_t>& delta,
                            double censor_fraction, Rng& rng) {
  if (censor_fraction < 0.0 || censor_fraction >= 1.0)
    throw std::invalid_argument("apply_random_censoring: fraction must lie in [0, 1)");
  delta.assign(static_cast<std::size_t>(response.size()), 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (int i = 0; i < response.size(); ++i) {
    if (unif(rng) >= censor_fraction) continue;
    delta[static_cast<std::size_t>(i)] = 0;
    response[i] -= expo(rng);  // log-time scale: time * exp(-E)
  }
}

std::pair<PathwayMembership, GeneNetwork> random_structure(const StructureConfig& config,
                                                           Rng& rng) {
  if (config.n_pathways < 1) throw std::invalid_argument("random_structure: n_pathways < 1");
  if (config.genes_per_pathway_min < 2 ||
      config.genes_per_pathway_max < config.genes_per_pathway_min)
    throw std::invalid_argument("random_structure: bad genes_per_pathway range");
  if (config.overlap_fraction < 0.0 || config.overlap_fraction >= 1.0)
    throw std::invalid_argument("random_structure: overlap_fraction must lie in [0, 1)");
  if (config.extra_edge_rate < 0.0)
    throw std::invalid_argument("random_structure: extra_edge_rate < 0");

  std::uniform_int_distribution<int> size_dist(config.genes_per_pathway_min,
                                               config.genes_per_pathway_max);
  std::vector<std::pair<int, int>> membership_pairs;
  std::set<std::pair<int, int>> edge_set;
  int next_gene = 0;

  for (int k = 0; k < config.n_pathways; ++k) {
    const int size = size_dist(rng);
    int n_overlap = static_cast<int>(std::floor(config.overlap_fraction * size));
    n_overlap = std::min(n_overlap, next_gene);

    std::vector<int> members;
    if (n_overlap > 0) {
      const std::vector<int> reused = sample_without_replacement(next_gene, n_overlap, rng);
      members.insert(members.end(), reused.begin(), reused.end());
    }
    for (int t = n_overlap; t < size; ++t) members.push_back(next_gene++);

    for (int j : members) membership_pairs.emplace_back(k, j);

    // Random spanning tree over the members, then extra in-pathway edges.
    std::vector<int> shuffled = members;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t t = 1; t < shuffled.size(); ++t) {
      std::uniform_int_distribution<std::size_t> pick(0, t - 1);
      const int a = shuffled[t], b = shuffled[pick(rng)];
      edge_set.emplace(std::min(a, b), std::max(a, b));
    }
    const int n_extra = static_cast<int>(std::floor(config.extra_edge_rate * size));
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (int t = 0; t < n_extra; ++t) {
      const int a = members[pick(rng)], b = members[pick(rng)];
      if (a != b) edge_set.emplace(std::min(a, b), std::max(a, b));
    }
  }

  std::vector<std::pair<std::string, std::string>> named_pairs;
  named_pairs.reserve(membership_pairs.size());
  char buf[32];
  auto pathway_name = [&](int k) {
    std::snprintf(buf, sizeof buf, "PW%03d", k);
    return std::string(buf);
  };
  auto gene_name = [&](int j) {
    std::snprintf(buf, sizeof buf, "G%04d", j);
    return std::string(buf);
  };
  for (const auto& [k, j] : membership_pairs) named_pairs.emplace_back(pathway_name(k), gene_name(j));
  PathwayMembership membership = make_membership(named_pairs);

  std::vector<std::pair<int, int>> edges;
  edges.reserve(edge_set.size());
  for (const auto& [a, b] : edge_set)
    edges.emplace_back(membership.gene_index.at(gene_name(a)), membership.gene_index.at(gene_name(b)));
  GeneNetwork network = make_network(membership.n_genes, edges);
  return {std::move(membership), std::move(network)};
}

void write_simulation(const std::string& out_dir, const PathwayMembership& membership,
                      const GeneNetwork& network, const SimData& data, const SimTruth& truth,
                      const std::vector<std::uint8_t>& delta) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create directory " + out_dir + ": " + ec.message());
  const bool survival = !delta.empty();
  if (survival && static_cast<int>(delta.size()) != data.response.size())
    throw std::invalid_argument("write_simulation: delta length mismatch");
  if (data.expression.cols() != membership.n_genes)
    throw std::invalid_argument("write_simulation: expression/membership mismatch");

  char buf[64];
  auto open = [&](const std::string& name) {
    std::ofstream out(out_dir + "/" + name);
    if (!out) throw DataError("cannot open " + out_dir + "/" + name + " for writing");
    return out;
  };

  {
    auto out = open("membership.txt");
    for (int k = 0; k < membership.n_pathways; ++k)
      for (int j : membership.genes_in_pathway[k])
        write_line(out, membership.pathway_ids[k] + "\t" + membership.gene_ids[j],
                   "membership.txt");
  }
  {
    auto out = open("network.txt");
    for (int a = 0; a < network.n_genes; ++a)
      for (int b : network.neighbors[a])
        if (a < b)
          write_line(out, membership.gene_ids[a] + "\t" + membership.gene_ids[b], "network.txt");
  }
  {
    auto out = open("expression.csv");
    std::string header = "sample_id";
    for (const auto& g : membership.gene_ids) header += "," + g;
    write_line(out, header, "expression.csv");
    for (int i = 0; i < data.expression.rows(); ++i) {
      std::string line = "S" + std::to_string(i);
      for (int j = 0; j < data.expression.cols(); ++j) {
        std::snprintf(buf, sizeof buf, ",%.10g", data.expression(i, j));
        line += buf;
      }
      write_line(out, line, "expression.csv");
    }
  }
  {
    auto out = open("response.csv");
    write_line(out, survival ? "sample_id,y,delta" : "sample_id,y", "response.csv");
    for (int i = 0; i < data.response.size(); ++i) {
      std::string line = "S" + std::to_string(i);
      // Under a survival outcome the generator's response is a log time;
      // the file stores times, matching what the loader expects.
      const double value = survival ? std::exp(data.response[i]) : data.response[i];
      std::snprintf(buf, sizeof buf, ",%.10g", value);
      line += buf;
      if (survival) line += delta[static_cast<std::size_t>(i)] ? ",1" : ",0";
      write_line(out, line, "response.csv");
    }
  }
  {
    auto out = open("truth.csv");
    write_line(out, "kind,id,value", "truth.csv");
    for (int k : truth.true_pathways)
      write_line(out, "pathway," + membership.pathway_ids[k] + ",1", "truth.csv");
    for (std::size_t g = 0; g < truth.true_genes.size(); ++g) {
      std::snprintf(buf, sizeof buf, ",%.10g", truth.beta[g]);
      write_line(out, "gene," + membership.gene_ids[truth.true_genes[g]] + buf, "truth.csv");
    }
    std::snprintf(buf, sizeof buf, "param,rho,%.10g", truth.rho);
    write_line(out, buf, "truth.csv");
    write_line(out, "param,seed," + std::to_string(truth.seed), "truth.csv");
  }
}

}  // namespace pathsel
