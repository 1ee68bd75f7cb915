#include "pathsel/membership.hpp"

#include "pathsel/common.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace pathsel {

bool PathwayMembership::contains(int pathway, int gene) const {
  const auto& genes = genes_in_pathway[pathway];
  return std::binary_search(genes.begin(), genes.end(), gene);
}

PathwayMembership make_membership(const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) throw DataError("membership is empty");

  std::set<std::string> pathway_names, gene_names;
  for (const auto& [pw, g] : pairs) {
    if (pw.empty() || g.empty()) throw DataError("empty pathway or gene id in membership");
    pathway_names.insert(pw);
    gene_names.insert(g);
  }

  PathwayMembership m;
  m.pathway_ids.assign(pathway_names.begin(), pathway_names.end());
  m.gene_ids.assign(gene_names.begin(), gene_names.end());
  m.n_pathways = static_cast<int>(m.pathway_ids.size());
  m.n_genes = static_cast<int>(m.gene_ids.size());
  for (int k = 0; k < m.n_pathways; ++k) m.pathway_index[m.pathway_ids[k]] = k;
  for (int j = 0; j < m.n_genes; ++j) m.gene_index[m.gene_ids[j]] = j;

  std::vector<std::set<int>> by_pathway(m.n_pathways);
  for (const auto& [pw, g] : pairs) by_pathway[m.pathway_index[pw]].insert(m.gene_index[g]);

  m.genes_in_pathway.resize(m.n_pathways);
  m.pathways_of_gene.resize(m.n_genes);
  for (int k = 0; k < m.n_pathways; ++k) {
    m.genes_in_pathway[k].assign(by_pathway[k].begin(), by_pathway[k].end());
    for (int j : m.genes_in_pathway[k]) m.pathways_of_gene[j].push_back(k);
  }
  // pathways_of_gene is sorted because k runs in increasing order above.
  return m;
}

PathwayMembership load_membership(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open membership file: " + path);

  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 'pathway_id<TAB>gene_id'");
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  if (pairs.empty()) throw DataError("membership file has no rows: " + path);
  return make_membership(pairs);
}

}  // namespace pathsel
