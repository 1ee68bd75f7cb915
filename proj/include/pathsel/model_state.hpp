#pragma once

#include "pathsel/common.hpp"

#include <optional>

namespace pathsel {

// Joint selection state: theta over pathways, gamma over genes, the MRF
// smoothing parameter eta, and (for survival outcomes) the imputed latent
// log survival times Z.
struct ModelState {
  BinaryVector theta;
  BinaryVector gamma;
  double eta = 0.0;
  std::optional<Vector> z_latent;

  int k_theta() const { return popcount(theta); }
  int n_selected_genes() const { return popcount(gamma); }
};

}  // namespace pathsel
