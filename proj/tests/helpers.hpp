// Shared scaffolding for the test binaries: temporary directories, file
// helpers, mask/bit-vector conversions, and small random problem instances.
#pragma once

#include "pathsel/common.hpp"
#include "pathsel/dataset.hpp"
#include "pathsel/membership.hpp"
#include "pathsel/model_state.hpp"
#include "pathsel/network.hpp"
#include "pathsel/priors.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

// Unique directory under the system temp root, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    const auto tag = std::to_string(rd()) + "_" + std::to_string(counter++);
    path = std::filesystem::temp_directory_path() / ("pathsel_test_" + tag);
    std::filesystem::create_directories(path);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }

  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("test helper: cannot write " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("test helper: cannot read " + path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return all;
}

// --- mask <-> BinaryVector ---------------------------------------------------

inline pathsel::BinaryVector bits_of(std::uint64_t mask, int n) {
  pathsel::BinaryVector bits(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) bits[static_cast<std::size_t>(j)] = (mask >> j) & 1u;
  return bits;
}

inline std::uint64_t mask_of(const pathsel::BinaryVector& bits) {
  std::uint64_t mask = 0;
  for (std::size_t j = 0; j < bits.size(); ++j)
    if (bits[j]) mask |= std::uint64_t{1} << j;
  return mask;
}

// --- random problem instances ------------------------------------------------

// Membership with `n_pathways` blocks of size in [min_size, max_size] drawn
// from a pool of `n_genes` names; overlapping by construction when the pool
// is smaller than the total draw.
inline pathsel::PathwayMembership random_membership(pathsel::Rng& rng, int n_pathways,
                                                    int n_genes, int min_size, int max_size) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::uniform_int_distribution<int> size_dist(min_size, max_size);
  std::uniform_int_distribution<int> gene_dist(0, n_genes - 1);
  auto gene_name = [](int j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "G%03d", j);
    return std::string(buf);
  };
  std::vector<char> used(static_cast<std::size_t>(n_genes), 0);
  for (int k = 0; k < n_pathways; ++k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "PW%02d", k);
    const std::string pw(buf);
    const int size = size_dist(rng);
    std::vector<char> in_this(static_cast<std::size_t>(n_genes), 0);
    for (int s = 0; s < size; ++s) {
      int j = gene_dist(rng);
      int guard = 0;
      while (in_this[static_cast<std::size_t>(j)] && guard++ < 4 * n_genes) j = gene_dist(rng);
      in_this[static_cast<std::size_t>(j)] = 1;
      used[static_cast<std::size_t>(j)] = 1;
      pairs.emplace_back(pw, gene_name(j));
    }
  }
  // Sweep up genes that no pathway drew so the membership covers the pool.
  for (int j = 0; j < n_genes; ++j) {
    if (!used[static_cast<std::size_t>(j)]) {
      std::uniform_int_distribution<int> pick(0, n_pathways - 1);
      char buf[16];
      std::snprintf(buf, sizeof buf, "PW%02d", pick(rng));
      pairs.emplace_back(std::string(buf), gene_name(j));
    }
  }
  return pathsel::make_membership(pairs);
}

inline pathsel::GeneNetwork random_network(pathsel::Rng& rng, int n_genes, double edge_prob) {
  std::vector<std::pair<int, int>> edges;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int a = 0; a < n_genes; ++a)
    for (int b = a + 1; b < n_genes; ++b)
      if (unif(rng) < edge_prob) edges.emplace_back(a, b);
  return pathsel::make_network(n_genes, edges);
}

// Column-centered i.i.d. normal expression block.
inline pathsel::Matrix random_expression(pathsel::Rng& rng, int n, int p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  pathsel::Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = normal(rng);
  x.rowwise() -= x.colwise().mean();
  return x;
}

inline pathsel::Vector random_response(pathsel::Rng& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  pathsel::Vector y(n);
  for (int i = 0; i < n; ++i) y[i] = normal(rng);
  return y;
}

// Rejection-samples a configuration that passes check_validity: random
// pathway set, at least one member gene per selected pathway, no orphans by
// construction, duplicates rejected by the validity check itself.
inline pathsel::ModelState random_valid_state(pathsel::Rng& rng,
                                              const pathsel::PathwayMembership& mem,
                                              double pathway_prob = 0.4,
                                              double gene_prob = 0.5) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    pathsel::ModelState state;
    state.theta.assign(static_cast<std::size_t>(mem.n_pathways), 0);
    state.gamma.assign(static_cast<std::size_t>(mem.n_genes), 0);
    for (int k = 0; k < mem.n_pathways; ++k)
      if (unif(rng) < pathway_prob) state.theta[static_cast<std::size_t>(k)] = 1;
    bool any = false;
    for (int k = 0; k < mem.n_pathways; ++k) any = any || state.theta[static_cast<std::size_t>(k)];
    if (!any) state.theta[0] = 1;
    for (int k = 0; k < mem.n_pathways; ++k) {
      if (!state.theta[static_cast<std::size_t>(k)]) continue;
      bool got = false;
      for (int j : mem.genes_in_pathway[static_cast<std::size_t>(k)]) {
        if (unif(rng) < gene_prob) {
          state.gamma[static_cast<std::size_t>(j)] = 1;
          got = true;
        }
      }
      if (!got) {
        const auto& members = mem.genes_in_pathway[static_cast<std::size_t>(k)];
        std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
        state.gamma[static_cast<std::size_t>(members[pick(rng)])] = 1;
      }
    }
    if (pathsel::check_validity(mem, state).valid) return state;
  }
  throw std::runtime_error("test helper: could not sample a valid state");
}

}  // namespace testutil
