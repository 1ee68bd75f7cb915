#pragma once

#include "pathsel/common.hpp"
#include "pathsel/membership.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pathsel {

// Undirected gene-gene relation network stored as sorted adjacency lists.
// No self loops; edges are symmetric (j appears in neighbors[i] iff i appears
// in neighbors[j]).  Quadratic forms gamma' R gamma are computed with R the
// full symmetric 0/1 adjacency matrix, so each edge contributes twice.
struct GeneNetwork {
  int n_genes = 0;
  std::vector<std::vector<int>> neighbors;
  std::int64_t n_edges = 0;  // undirected edge count

  bool has_edge(int i, int j) const;
  static GeneNetwork empty(int n_genes);
};

GeneNetwork make_network(int n_genes, const std::vector<std::pair<int, int>>& edges);

// Reads a two-column tab-separated "gene_id<TAB>gene_id" edge list.  Gene ids
// must exist in the membership; self loops are rejected; duplicate edges (in
// either orientation) collapse to one.
GeneNetwork load_network(const std::string& path, const PathwayMembership& membership);

// How the network is restricted to the pathways currently in the model.
//   union_membership: keep an edge iff both endpoints belong to the union of
//     the selected pathways' gene sets (default).
//   shared_pathway:   keep an edge iff both endpoints belong to one common
//     selected pathway (strictly sparser).
enum class EdgeRule { union_membership, shared_pathway };

// Subnetwork induced by the selected pathways under the given rule.  The
// returned network keeps the full gene indexing; genes outside the selection
// simply have empty neighbor lists.
GeneNetwork active_adjacency(const GeneNetwork& network, const PathwayMembership& membership,
                             const BinaryVector& theta, EdgeRule rule = EdgeRule::union_membership);

// gamma' R gamma with R the symmetric adjacency of `network` (each edge with
// both endpoints selected contributes 2).
double mrf_quad_form(const BinaryVector& gamma, const GeneNetwork& network);

}  // namespace pathsel
