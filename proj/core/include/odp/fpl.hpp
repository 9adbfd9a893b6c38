#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "odp/kdag.hpp"
#include "odp/random.hpp"

namespace odp {

/// Follow the Perturbed Leader over edge losses.
struct FplState {
  std::vector<double> cumulative_edge_losses;
  double perturbation_scale = 1.0;
};

FplState fpl_init(const KDag& dag, double perturbation_scale);

/// sqrt(T D / n_components).
double fpl_default_scale(std::size_t horizon, double d_bound, std::size_t num_components);

/// Argmin of cumulative + u, u_e ~ U[0, scale] i.i.d. per edge. With scale 0
/// no randomness is consumed and the result is solve_min_sum's argmin.
Multipath fpl_predict(const FplState& state, const KDag& dag, Rng& rng);

void fpl_update(FplState& state, std::span<const double> edge_losses);

}  // namespace odp
