#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "odp/kdag.hpp"

namespace odp {

/// Losses of a min-sum recurrence: one per multiedge (the local cost of a
/// recursion step) and one per sink (the base-case cost).
struct DpLosses {
  std::vector<double> multiedge_loss;               // indexed by MultiedgeId
  std::unordered_map<VertexId, double> sink_loss;   // keyed by sink vertex
};

using EdgeLosses = std::vector<double>;

/// l(v,u) = L_M(m)/k + [u is a sink] * L_T(u), for every edge (v,u) of m.
/// Every multipath then satisfies
///   pi . l = sum_m pi_m L_M(m) + sum_{sinks u} pi_in(u) L_T(u).
EdgeLosses lower_edge_losses(const KDag& dag, const DpLosses& losses);

struct MinSumSolution {
  double value = 0.0;
  Multipath argmin;
};

/// Minimum of pi . l over all multipaths. Ties go to the smallest multiedge id
/// at each vertex. `value` is evaluated as multipath_loss(argmin, l).
MinSumSolution solve_min_sum_edges(const KDag& dag, std::span<const double> edge_losses);

MinSumSolution solve_min_sum(const KDag& dag, const DpLosses& losses);

/// Per-vertex optimal cost-to-go OPT(v) on edge losses (0 at sinks).
std::vector<double> min_sum_table(const KDag& dag, std::span<const double> edge_losses);

}  // namespace odp
