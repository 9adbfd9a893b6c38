#include "odp/dp_core.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace odp {

EdgeLosses lower_edge_losses(const KDag& dag, const DpLosses& losses) {
  if (losses.multiedge_loss.size() < dag.num_multiedges())
    throw InvalidArgument("missing loss for multiedge #" +
                          std::to_string(losses.multiedge_loss.size()));
  if (losses.multiedge_loss.size() > dag.num_multiedges())
    throw InvalidArgument("more multiedge losses than multiedges");
  for (VertexId s : dag.sinks())
    if (!losses.sink_loss.contains(s))
      throw InvalidArgument("missing sink loss for vertex " + dag.vertex_name(s));

  const double k = dag.k();
  EdgeLosses out(dag.num_edges());
  for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m) {
    const double lm = losses.multiedge_loss[m];
    if (!std::isfinite(lm)) throw InvalidArgument("non-finite loss on multiedge #" + std::to_string(m));
    for (int j = 0; j < dag.k(); ++j) {
      const EdgeId e = dag.first_edge(m) + static_cast<EdgeId>(j);
      const VertexId u = dag.edge_to(e);
      double value = lm / k;
      if (dag.is_sink(u)) {
        const double lt = losses.sink_loss.at(u);
        if (!std::isfinite(lt)) throw InvalidArgument("non-finite sink loss at " + dag.vertex_name(u));
        value += lt;
      }
      out[e] = value;
    }
  }
  return out;
}

std::vector<double> min_sum_table(const KDag& dag, std::span<const double> edge_losses) {
  if (edge_losses.size() != dag.num_edges())
    throw InvalidArgument("edge loss vector has wrong dimension");
  std::vector<double> opt(dag.num_vertices(), 0.0);
  const auto order = dag.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId v = *it;
    if (dag.is_sink(v)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (MultiedgeId m : dag.out_multiedges(v)) {
      double cost = 0.0;
      for (int j = 0; j < dag.k(); ++j) {
        const EdgeId e = dag.first_edge(m) + static_cast<EdgeId>(j);
        cost += edge_losses[e] + opt[dag.edge_to(e)];
      }
      if (cost < best) best = cost;
    }
    opt[v] = best;
  }
  return opt;
}

MinSumSolution solve_min_sum_edges(const KDag& dag, std::span<const double> edge_losses) {
  const std::vector<double> opt = min_sum_table(dag, edge_losses);

  // Chosen multiedge per vertex: first (smallest id) achieving the minimum.
  std::vector<MultiedgeId> choice(dag.num_vertices(), 0);
  for (VertexId v = 0; v < dag.num_vertices(); ++v) {
    if (dag.is_sink(v)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (MultiedgeId m : dag.out_multiedges(v)) {
      double cost = 0.0;
      for (int j = 0; j < dag.k(); ++j) {
        const EdgeId e = dag.first_edge(m) + static_cast<EdgeId>(j);
        cost += edge_losses[e] + opt[dag.edge_to(e)];
      }
      if (cost < best) {
        best = cost;
        choice[v] = m;
      }
    }
  }

  MinSumSolution sol;
  sol.argmin.counts.assign(dag.num_edges(), 0);
  std::vector<std::uint32_t> draws(dag.num_vertices(), 0);
  draws[dag.source()] = 1;
  for (VertexId v : dag.topo_order()) {
    if (dag.is_sink(v) || draws[v] == 0) continue;
    const MultiedgeId m = choice[v];
    for (int j = 0; j < dag.k(); ++j) {
      const EdgeId e = dag.first_edge(m) + static_cast<EdgeId>(j);
      sol.argmin.counts[e] += draws[v];
      draws[dag.edge_to(e)] += draws[v];
    }
  }
  sol.value = multipath_loss(sol.argmin, edge_losses);
  return sol;
}

MinSumSolution solve_min_sum(const KDag& dag, const DpLosses& losses) {
  const EdgeLosses l = lower_edge_losses(dag, losses);
  return solve_min_sum_edges(dag, l);
}

}  // namespace odp
