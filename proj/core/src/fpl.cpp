#include "odp/fpl.hpp"

#include <cmath>

#include "odp/dp_core.hpp"
#include "odp/error.hpp"

namespace odp {

FplState fpl_init(const KDag& dag, double perturbation_scale) {
  if (!(perturbation_scale >= 0.0) || !std::isfinite(perturbation_scale))
    throw InvalidArgument("fpl: perturbation scale must be finite and >= 0");
  return {std::vector<double>(dag.num_edges(), 0.0), perturbation_scale};
}

double fpl_default_scale(std::size_t horizon, double d_bound, std::size_t num_components) {
  if (horizon == 0 || num_components == 0 || !(d_bound > 0.0))
    throw InvalidArgument("fpl_default_scale: parameters must be positive");
  return std::sqrt(static_cast<double>(horizon) * d_bound / static_cast<double>(num_components));
}

Multipath fpl_predict(const FplState& state, const KDag& dag, Rng& rng) {
  if (state.cumulative_edge_losses.size() != dag.num_edges())
    throw InvalidArgument("fpl_predict: state does not match the dag");
  if (state.perturbation_scale == 0.0)
    return solve_min_sum_edges(dag, state.cumulative_edge_losses).argmin;
  std::vector<double> perturbed = state.cumulative_edge_losses;
  for (double& x : perturbed) x += state.perturbation_scale * uniform01(rng);
  return solve_min_sum_edges(dag, perturbed).argmin;
}

void fpl_update(FplState& state, std::span<const double> edge_losses) {
  if (edge_losses.size() != state.cumulative_edge_losses.size())
    throw InvalidArgument("fpl_update: wrong dimension");
  for (std::size_t e = 0; e < edge_losses.size(); ++e) state.cumulative_edge_losses[e] += edge_losses[e];
}

}  // namespace odp
