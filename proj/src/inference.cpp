#include "pathsel/inference.hpp"

#include "pathsel/priors.hpp"
#include "pathsel/scores.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace pathsel {

namespace {

void format_probability(std::string& out, double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", p);
  out += buf;
}

}  // namespace

Vector pathway_marginals(const std::vector<ChainTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("pathway_marginals: no chains");
  const int k_count = traces.front().n_pathways;
  Vector counts = Vector::Zero(k_count);
  std::int64_t total = 0;
  for (const auto& t : traces) {
    if (t.n_pathways != k_count) throw std::invalid_argument("pathway_marginals: chain shape mismatch");
    for (std::int64_t r = 0; r < t.n_records(); ++r) {
      if (!t.is_post_burn_in(r)) continue;
      ++total;
      const std::size_t base = static_cast<std::size_t>(r) * static_cast<std::size_t>(t.theta_words);
      for (int w = 0; w < t.theta_words; ++w) {
        std::uint64_t word = t.theta_bits[base + static_cast<std::size_t>(w)];
        while (word) {
          const int b = std::countr_zero(word);
          counts[w * 64 + b] += 1.0;
          word &= word - 1;
        }
      }
    }
  }
  if (total == 0) throw std::invalid_argument("pathway_marginals: no post-burn-in records");
  return counts / static_cast<double>(total);
}

GeneConditionals gene_conditionals(const std::vector<ChainTrace>& traces,
                                   const PathwayMembership& membership,
                                   const std::vector<int>& pathway_set) {
  if (traces.empty()) throw std::invalid_argument("gene_conditionals: no chains");
  if (pathway_set.empty()) throw std::invalid_argument("gene_conditionals: empty pathway set");
  const int p = membership.n_genes;
  const int gamma_words = traces.front().gamma_words;

  // Per-pathway member masks in the packed gamma layout: the qualifying-gene
  // mask of a record is the union of masks of selected pathways in the set.
  std::vector<std::vector<std::uint64_t>> member_mask;
  for (int k : pathway_set) {
    if (k < 0 || k >= membership.n_pathways)
      throw std::invalid_argument("gene_conditionals: pathway index out of range");
    std::vector<std::uint64_t> mask(static_cast<std::size_t>(gamma_words), 0);
    for (int j : membership.genes_in_pathway[k])
      mask[static_cast<std::size_t>(j / 64)] |= std::uint64_t{1} << (j % 64);
    member_mask.push_back(std::move(mask));
  }

  std::vector<std::int64_t> qualified(static_cast<std::size_t>(p), 0);
  std::vector<std::int64_t> selected(static_cast<std::size_t>(p), 0);
  std::vector<std::uint64_t> qual_mask(static_cast<std::size_t>(gamma_words));

  for (const auto& t : traces) {
    if (t.n_genes != p || t.gamma_words != gamma_words)
      throw std::invalid_argument("gene_conditionals: chain shape mismatch");
    for (std::int64_t r = 0; r < t.n_records(); ++r) {
      if (!t.is_post_burn_in(r)) continue;
      std::fill(qual_mask.begin(), qual_mask.end(), 0);
      const std::size_t tbase = static_cast<std::size_t>(r) * static_cast<std::size_t>(t.theta_words);
      for (std::size_t s = 0; s < pathway_set.size(); ++s) {
        const int k = pathway_set[s];
        if (!((t.theta_bits[tbase + static_cast<std::size_t>(k / 64)] >> (k % 64)) & 1)) continue;
        for (int w = 0; w < gamma_words; ++w) qual_mask[static_cast<std::size_t>(w)] |= member_mask[s][static_cast<std::size_t>(w)];
      }
      const std::size_t gbase = static_cast<std::size_t>(r) * static_cast<std::size_t>(gamma_words);
      for (int w = 0; w < gamma_words; ++w) {
        std::uint64_t q = qual_mask[static_cast<std::size_t>(w)];
        const std::uint64_t g = t.gamma_bits[gbase + static_cast<std::size_t>(w)];
        while (q) {
          const int b = std::countr_zero(q);
          const int j = w * 64 + b;
          ++qualified[static_cast<std::size_t>(j)];
          selected[static_cast<std::size_t>(j)] += (g >> b) & 1;
          q &= q - 1;
        }
      }
    }
  }

  GeneConditionals out;
  out.probability = Vector::Zero(p);
  out.ever_qualified.assign(static_cast<std::size_t>(p), 0);
  for (int j = 0; j < p; ++j) {
    if (qualified[static_cast<std::size_t>(j)] > 0) {
      out.ever_qualified[static_cast<std::size_t>(j)] = 1;
      out.probability[j] = static_cast<double>(selected[static_cast<std::size_t>(j)]) /
                           static_cast<double>(qualified[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

std::optional<double> chain_concordance(const ChainTrace& a, const ChainTrace& b) {
  if (a.n_pathways != b.n_pathways) throw std::invalid_argument("chain_concordance: K mismatch");
  const Vector ma = pathway_marginals({a});
  const Vector mb = pathway_marginals({b});
  const Vector da = ma.array() - ma.mean();
  const Vector db = mb.array() - mb.mean();
  const double va = da.squaredNorm(), vb = db.squaredNorm();
  if (va <= 0 || vb <= 0) return std::nullopt;
  return da.dot(db) / std::sqrt(va * vb);
}

std::vector<ModelCount> top_models(const std::vector<ChainTrace>& traces, int max_models) {
  if (traces.empty()) throw std::invalid_argument("top_models: no chains");
  struct Key {
    std::string bytes;
    bool operator==(const Key& o) const { return bytes == o.bytes; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return std::hash<std::string>{}(k.bytes); }
  };
  std::unordered_map<Key, std::int64_t, KeyHash> counts;

  const int tw = traces.front().theta_words, gw = traces.front().gamma_words;
  for (const auto& t : traces) {
    for (std::int64_t r = 0; r < t.n_records(); ++r) {
      if (!t.is_post_burn_in(r)) continue;
      Key key;
      key.bytes.reserve(static_cast<std::size_t>(tw + gw) * 8);
      const std::size_t tb = static_cast<std::size_t>(r) * static_cast<std::size_t>(tw);
      const std::size_t gb = static_cast<std::size_t>(r) * static_cast<std::size_t>(gw);
      for (int w = 0; w < tw; ++w)
        key.bytes.append(reinterpret_cast<const char*>(&t.theta_bits[tb + static_cast<std::size_t>(w)]), 8);
      for (int w = 0; w < gw; ++w)
        key.bytes.append(reinterpret_cast<const char*>(&t.gamma_bits[gb + static_cast<std::size_t>(w)]), 8);
      ++counts[key];
    }
  }

  struct Entry {
    std::int64_t count;
    std::string theta_hex;
    std::string gamma_hex;
    BinaryVector theta;
    BinaryVector gamma;
  };
  std::vector<Entry> entries;
  entries.reserve(counts.size());
  const int n_pathways = traces.front().n_pathways, n_genes = traces.front().n_genes;
  for (const auto& [key, count] : counts) {
    Entry e;
    e.count = count;
    e.theta.assign(static_cast<std::size_t>(n_pathways), 0);
    e.gamma.assign(static_cast<std::size_t>(n_genes), 0);
    std::vector<std::uint64_t> words(static_cast<std::size_t>(tw + gw));
    std::memcpy(words.data(), key.bytes.data(), key.bytes.size());
    for (int j = 0; j < n_pathways; ++j) e.theta[j] = (words[static_cast<std::size_t>(j / 64)] >> (j % 64)) & 1;
    for (int j = 0; j < n_genes; ++j)
      e.gamma[j] = (words[static_cast<std::size_t>(tw + j / 64)] >> (j % 64)) & 1;
    e.theta_hex = to_hex(e.theta);
    e.gamma_hex = to_hex(e.gamma);
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.count != y.count) return x.count > y.count;
    if (x.theta_hex != y.theta_hex) return x.theta_hex < y.theta_hex;
    return x.gamma_hex < y.gamma_hex;
  });
  if (max_models >= 0 && static_cast<int>(entries.size()) > max_models) entries.resize(static_cast<std::size_t>(max_models));

  std::vector<ModelCount> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back({std::move(e.theta), std::move(e.gamma), e.count});
  return out;
}

Selection threshold_selection(const std::vector<ChainTrace>& traces,
                              const PathwayMembership& membership, double pathway_threshold,
                              double gene_threshold) {
  const Vector marginals = pathway_marginals(traces);
  Selection sel;
  sel.theta.assign(static_cast<std::size_t>(membership.n_pathways), 0);
  sel.gamma.assign(static_cast<std::size_t>(membership.n_genes), 0);

  std::vector<int> selected_pathways;
  for (int k = 0; k < membership.n_pathways; ++k) {
    if (marginals[k] >= pathway_threshold) {
      sel.theta[k] = 1;
      selected_pathways.push_back(k);
    }
  }
  if (selected_pathways.empty()) return sel;  // empty model

  const GeneConditionals cond = gene_conditionals(traces, membership, selected_pathways);
  for (int j = 0; j < membership.n_genes; ++j)
    if (cond.ever_qualified[static_cast<std::size_t>(j)] && cond.probability[j] >= gene_threshold)
      sel.gamma[j] = 1;

  // Repair to a valid configuration.  Each pass only removes indicators, so
  // the loop terminates.
  for (;;) {
    bool changed = false;
    // orphan genes
    for (int j = 0; j < membership.n_genes; ++j) {
      if (!sel.gamma[j]) continue;
      bool covered = false;
      for (int k : membership.pathways_of_gene[j])
        if (sel.theta[k]) { covered = true; break; }
      if (!covered) {
        sel.gamma[j] = 0;
        changed = true;
      }
    }
    // pathways with no selected gene
    for (int k = 0; k < membership.n_pathways; ++k) {
      if (!sel.theta[k]) continue;
      bool any = false;
      for (int j : membership.genes_in_pathway[k])
        if (sel.gamma[j]) { any = true; break; }
      if (!any) {
        sel.theta[k] = 0;
        changed = true;
      }
    }
    // duplicate subsets: keep the pathway with the larger marginal
    std::map<std::vector<int>, int> owner;
    for (int k = 0; k < membership.n_pathways; ++k) {
      if (!sel.theta[k]) continue;
      std::vector<int> subset;
      for (int j : membership.genes_in_pathway[k])
        if (sel.gamma[j]) subset.push_back(j);
      auto [it, inserted] = owner.try_emplace(std::move(subset), k);
      if (!inserted) {
        const int loser = marginals[it->second] >= marginals[k] ? k : it->second;
        const int winner = loser == k ? it->second : k;
        sel.theta[loser] = 0;
        it->second = winner;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return sel;
}

Vector predict(const Dataset& train, const Dataset& test, const PathwayMembership& membership,
               const Selection& selection, const Hyperparameters& hp) {
  if (train.n_genes() != membership.n_genes || test.n_genes() != membership.n_genes)
    throw std::invalid_argument("predict: dataset gene count mismatch");
  ModelState state;
  state.theta = selection.theta;
  state.gamma = selection.gamma;
  if (!check_validity(membership, state).valid)
    throw std::invalid_argument("predict: selection is not a valid configuration");

  const double y_bar = train.response.mean();
  Vector predicted = Vector::Constant(test.n_samples, y_bar);

  std::vector<int> pathways;
  for (int k = 0; k < membership.n_pathways; ++k)
    if (selection.theta[k]) pathways.push_back(k);
  if (pathways.empty()) return predicted;

  // Test expression re-centered with the training means.
  const Matrix test_centered =
      raw_expression(test).rowwise() - train.column_means.transpose();

  const int k_sel = static_cast<int>(pathways.size());
  Matrix t_train(train.n_samples, k_sel);
  Matrix t_test(test.n_samples, k_sel);
  for (int c = 0; c < k_sel; ++c) {
    std::vector<int> genes;
    for (int j : membership.genes_in_pathway[pathways[static_cast<std::size_t>(c)]])
      if (selection.gamma[j]) genes.push_back(j);
    Matrix x_train(train.n_samples, static_cast<int>(genes.size()));
    Matrix x_test(test.n_samples, static_cast<int>(genes.size()));
    for (std::size_t g = 0; g < genes.size(); ++g) {
      x_train.col(static_cast<int>(g)) = train.expression.col(genes[g]);
      x_test.col(static_cast<int>(g)) = test_centered.col(genes[g]);
    }
    // PCA loading from training data only, oriented along the supervised
    // (PLS) training scores; the same loading projects the test block.
    const PlsResult pls = pls_first_component(x_train, train.response);
    const PcaResult pca = pca_first_component(x_train, pls.degenerate ? nullptr : &pls.scores);
    t_train.col(c) = pca.scores;
    t_test.col(c) = x_test * pca.loading;
  }

  Matrix gram = t_train.transpose() * t_train;
  gram.diagonal().array() += 1.0 / hp.h;
  const Vector beta = Eigen::LDLT<Matrix>(gram).solve(t_train.transpose() * train.response);
  predicted += t_test * beta;
  return predicted;
}

double prediction_mse(const Vector& predicted, const Dataset& test) {
  if (predicted.size() != test.n_samples)
    throw std::invalid_argument("prediction_mse: length mismatch");
  double sum = 0.0;
  int n = 0;
  for (int i = 0; i < test.n_samples; ++i) {
    if (test.outcome_kind == OutcomeKind::survival && !test.censoring[static_cast<std::size_t>(i)])
      continue;  // censored: the event time is unknown
    const double d = predicted[i] - test.response[i];
    sum += d * d;
    ++n;
  }
  if (n == 0) throw DataError("prediction_mse: no observed events in test set");
  return sum / n;
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

void write_pathway_marginals_csv(std::ostream& out, const PathwayMembership& membership,
                                 const Vector& marginals) {
  if (marginals.size() != membership.n_pathways)
    throw std::invalid_argument("marginals length mismatch");
  out << "pathway_id,probability\n";
  std::string line;
  for (int k = 0; k < membership.n_pathways; ++k) {
    line.clear();
    line += membership.pathway_ids[k];
    line += ',';
    format_probability(line, marginals[k]);
    line += '\n';
    out << line;
  }
}

void write_gene_conditionals_csv(std::ostream& out, const PathwayMembership& membership,
                                 const GeneConditionals& conditionals) {
  if (conditionals.probability.size() != membership.n_genes)
    throw std::invalid_argument("conditionals length mismatch");
  out << "gene_id,probability,flag\n";
  std::string line;
  for (int j = 0; j < membership.n_genes; ++j) {
    line.clear();
    line += membership.gene_ids[j];
    line += ',';
    format_probability(line, conditionals.probability[j]);
    line += conditionals.ever_qualified[static_cast<std::size_t>(j)] ? ",ok\n" : ",never_qualified\n";
    out << line;
  }
}

void write_predictions_csv(std::ostream& out, const std::vector<std::string>& sample_ids,
                           const Vector& predicted) {
  if (static_cast<int>(sample_ids.size()) != predicted.size())
    throw std::invalid_argument("predictions length mismatch");
  out << "sample_id,y_hat\n";
  std::string line;
  for (int i = 0; i < predicted.size(); ++i) {
    line.clear();
    line += sample_ids[static_cast<std::size_t>(i)];
    line += ',';
    format_probability(line, predicted[i]);
    line += '\n';
    out << line;
  }
}

void write_models_csv(std::ostream& out, const std::vector<ModelCount>& models,
                      std::int64_t total_records) {
  out << "rank,frequency,theta_hex,gamma_hex\n";
  std::string line;
  for (std::size_t i = 0; i < models.size(); ++i) {
    line.clear();
    line += std::to_string(i + 1);
    line += ',';
    format_probability(line, static_cast<double>(models[i].count) / static_cast<double>(total_records));
    line += ',';
    line += to_hex(models[i].theta);
    line += ',';
    line += to_hex(models[i].gamma);
    line += '\n';
    out << line;
  }
}

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  out << "iteration,k_theta,n_genes,eta,log_posterior\n";
  char buf[160];
  for (std::int64_t r = 0; r < trace.n_records(); ++r) {
    std::snprintf(buf, sizeof buf, "%lld,%d,%d,%.10g,%.10g\n",
                  static_cast<long long>(trace.iteration[static_cast<std::size_t>(r)]),
                  trace.k_theta[static_cast<std::size_t>(r)],
                  trace.n_selected[static_cast<std::size_t>(r)],
                  trace.eta[static_cast<std::size_t>(r)],
                  trace.log_posterior[static_cast<std::size_t>(r)]);
    out << buf;
  }
}

void write_states_csv(std::ostream& out, const ChainTrace& trace) {
  out << "iteration,theta_hex,gamma_hex,eta,log_posterior\n";
  char buf[96];
  for (std::int64_t r = 0; r < trace.n_records(); ++r) {
    out << trace.iteration[static_cast<std::size_t>(r)] << ',' << to_hex(trace.theta_at(r)) << ','
        << to_hex(trace.gamma_at(r)) << ',';
    std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", trace.eta[static_cast<std::size_t>(r)],
                  trace.log_posterior[static_cast<std::size_t>(r)]);
    out << buf;
  }
}

}  // namespace pathsel
