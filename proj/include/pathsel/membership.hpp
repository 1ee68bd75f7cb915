#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace pathsel {

// Pathway-to-gene membership.  Pathways and genes are indexed 0..K-1 and
// 0..p-1 in the lexicographic order of their string identifiers, so every
// downstream structure (indicator vectors, score columns, output files) has a
// single canonical ordering regardless of file row order.
struct PathwayMembership {
  int n_pathways = 0;
  int n_genes = 0;
  std::vector<std::string> pathway_ids;  // sorted
  std::vector<std::string> gene_ids;     // sorted
  std::vector<std::vector<int>> genes_in_pathway;  // sorted gene indices per pathway
  std::vector<std::vector<int>> pathways_of_gene;  // sorted pathway indices per gene
  std::unordered_map<std::string, int> pathway_index;
  std::unordered_map<std::string, int> gene_index;

  bool contains(int pathway, int gene) const;
  int pathway_size(int pathway) const { return static_cast<int>(genes_in_pathway[pathway].size()); }
};

// Builds a membership object from (pathway_id, gene_id) pairs; used by the
// file loader and by the simulation generator.
PathwayMembership make_membership(const std::vector<std::pair<std::string, std::string>>& pairs);

// Reads a two-column tab-separated file, one "pathway_id<TAB>gene_id" row per
// membership pair.  Duplicate rows collapse to one membership.  Every gene
// must belong to at least one pathway by construction; empty pathways cannot
// be expressed in the format.
PathwayMembership load_membership(const std::string& path);

}  // namespace pathsel
