#include "pathsel/network.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace pathsel {

bool GeneNetwork::has_edge(int i, int j) const {
  const auto& nb = neighbors[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

GeneNetwork GeneNetwork::empty(int n_genes) {
  GeneNetwork g;
  g.n_genes = n_genes;
  g.neighbors.resize(static_cast<std::size_t>(n_genes));
  return g;
}

GeneNetwork make_network(int n_genes, const std::vector<std::pair<int, int>>& edges) {
  std::set<std::pair<int, int>> unique;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n_genes || j >= n_genes)
      throw DataError("network edge endpoint out of range");
    if (i == j) throw DataError("self loop in network");
    unique.insert({std::min(i, j), std::max(i, j)});
  }
  GeneNetwork g = GeneNetwork::empty(n_genes);
  for (auto [i, j] : unique) {
    g.neighbors[i].push_back(j);
    g.neighbors[j].push_back(i);
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());
  g.n_edges = static_cast<std::int64_t>(unique.size());
  return g;
}

GeneNetwork load_network(const std::string& path, const PathwayMembership& membership) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open network file: " + path);

  std::vector<std::pair<int, int>> edges;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 'gene_id<TAB>gene_id'");
    const std::string a = line.substr(0, tab), b = line.substr(tab + 1);
    const auto ia = membership.gene_index.find(a);
    const auto ib = membership.gene_index.find(b);
    if (ia == membership.gene_index.end())
      throw DataError(path + ":" + std::to_string(line_no) + ": unknown gene id '" + a + "'");
    if (ib == membership.gene_index.end())
      throw DataError(path + ":" + std::to_string(line_no) + ": unknown gene id '" + b + "'");
    if (ia->second == ib->second)
      throw DataError(path + ":" + std::to_string(line_no) + ": self loop on gene '" + a + "'");
    edges.emplace_back(ia->second, ib->second);
  }
  return make_network(membership.n_genes, edges);
}

GeneNetwork active_adjacency(const GeneNetwork& network, const PathwayMembership& membership,
                             const BinaryVector& theta, EdgeRule rule) {
  const int p = network.n_genes;
  GeneNetwork out = GeneNetwork::empty(p);

  if (rule == EdgeRule::union_membership) {
    std::vector<std::uint8_t> covered(static_cast<std::size_t>(p), 0);
    for (int k = 0; k < membership.n_pathways; ++k)
      if (theta[k])
        for (int j : membership.genes_in_pathway[k]) covered[j] = 1;
    for (int i = 0; i < p; ++i) {
      if (!covered[i]) continue;
      // neighbors are sorted: visiting each edge from its larger endpoint
      // adds both directions exactly once.
      for (int j : network.neighbors[i]) {
        if (j >= i) break;
        if (covered[j]) {
          out.neighbors[i].push_back(j);
          out.neighbors[j].push_back(i);
          ++out.n_edges;
        }
      }
    }
  } else {
    // shared_pathway: both endpoints inside one common selected pathway.
    for (int i = 0; i < p; ++i) {
      for (int j : network.neighbors[i]) {
        if (j >= i) break;
        bool shared = false;
        for (int k : membership.pathways_of_gene[i]) {
          if (theta[k] && membership.contains(k, j)) {
            shared = true;
            break;
          }
        }
        if (shared) {
          out.neighbors[i].push_back(j);
          out.neighbors[j].push_back(i);
          ++out.n_edges;
        }
      }
    }
  }
  for (auto& nb : out.neighbors) std::sort(nb.begin(), nb.end());
  return out;
}

double mrf_quad_form(const BinaryVector& gamma, const GeneNetwork& network) {
  // gamma' R gamma with symmetric 0/1 adjacency: twice the number of edges
  // whose endpoints are both selected.
  std::int64_t both = 0;
  for (int i = 0; i < network.n_genes; ++i) {
    if (!gamma[i]) continue;
    for (int j : network.neighbors[i]) {
      if (j >= i) break;
      both += gamma[j];
    }
  }
  return 2.0 * static_cast<double>(both);
}

}  // namespace pathsel
