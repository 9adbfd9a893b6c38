#include "odp/hedge_expanded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace odp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}
}  // namespace

MultiedgeWeights::MultiedgeWeights(const KDag& dag, std::vector<double> log_weights)
    : dag_(&dag), log_weights_(std::move(log_weights)) {
  if (log_weights_.size() != dag.num_multiedges())
    throw InvalidArgument("MultiedgeWeights: one weight per multiedge required");
  weights_.resize(log_weights_.size());
  std::transform(log_weights_.begin(), log_weights_.end(), weights_.begin(),
                 [](double lw) { return std::exp(lw); });
}

double MultiedgeWeights::normalization_residual() const {
  double worst = 0.0;
  for (VertexId v = 0; v < dag_->num_vertices(); ++v) {
    if (dag_->is_sink(v)) continue;
    double sum = 0.0;
    for (MultiedgeId m : dag_->out_multiedges(v)) sum += weights_[m];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

PushResult weight_push(const KDag& dag, std::span<const double> w_hat) {
  if (w_hat.size() != dag.num_multiedges())
    throw InvalidArgument("weight_push: one weight per multiedge required");
  const std::size_t n = dag.num_vertices();
  std::vector<double> z(n, 1.0);
  const auto order = dag.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId v = *it;
    if (dag.is_sink(v)) continue;
    double sum = 0.0;
    bool any_positive = false;
    for (MultiedgeId m : dag.out_multiedges(v)) {
      if (!(w_hat[m] >= 0.0) || !std::isfinite(w_hat[m]))
        throw InvalidArgument("weight_push: weights must be finite and nonnegative");
      any_positive = any_positive || w_hat[m] > 0.0;
      double prod = w_hat[m];
      for (VertexId u : dag.multiedge_targets(m)) prod *= z[u];
      sum += prod;
    }
    if (!any_positive)
      throw InvalidArgument("weight_push: all-zero multiedge group at vertex " + dag.vertex_name(v));
    if (!(sum > 0.0))
      throw InvalidArgument("weight_push: no positive-weight multipath from vertex " +
                            dag.vertex_name(v));
    z[v] = sum;
  }

  std::vector<double> log_w(dag.num_multiedges());
  for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m) {
    double w = w_hat[m];
    for (VertexId u : dag.multiedge_targets(m)) w *= z[u];
    w /= z[dag.multiedge_from(m)];
    log_w[m] = std::log(w);
  }
  std::vector<double> log_z(n);
  std::transform(z.begin(), z.end(), log_z.begin(), [](double x) { return std::log(x); });
  return PushResult{MultiedgeWeights(dag, std::move(log_w)), std::move(z), std::move(log_z)};
}

PushResult weight_push_log(const KDag& dag, std::span<const double> log_w_hat) {
  if (log_w_hat.size() != dag.num_multiedges())
    throw InvalidArgument("weight_push_log: one weight per multiedge required");
  const std::size_t n = dag.num_vertices();
  std::vector<double> log_z(n, 0.0);
  const auto order = dag.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const VertexId v = *it;
    if (dag.is_sink(v)) continue;
    double acc = kNegInf;
    bool any_positive = false;
    for (MultiedgeId m : dag.out_multiedges(v)) {
      if (std::isnan(log_w_hat[m]) || log_w_hat[m] == std::numeric_limits<double>::infinity())
        throw InvalidArgument("weight_push_log: log weights must be finite or -inf");
      any_positive = any_positive || log_w_hat[m] != kNegInf;
      double term = log_w_hat[m];
      for (VertexId u : dag.multiedge_targets(m)) term += log_z[u];
      acc = log_add(acc, term);
    }
    if (!any_positive)
      throw InvalidArgument("weight_push: all-zero multiedge group at vertex " + dag.vertex_name(v));
    if (acc == kNegInf)
      throw InvalidArgument("weight_push: no positive-weight multipath from vertex " +
                            dag.vertex_name(v));
    log_z[v] = acc;
  }

  std::vector<double> log_w(dag.num_multiedges());
  for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m) {
    double lw = log_w_hat[m];
    for (VertexId u : dag.multiedge_targets(m)) lw += log_z[u];
    log_w[m] = lw - log_z[dag.multiedge_from(m)];
  }
  std::vector<double> z(n);
  std::transform(log_z.begin(), log_z.end(), z.begin(), [](double x) { return std::exp(x); });
  return PushResult{MultiedgeWeights(dag, std::move(log_w)), std::move(z), std::move(log_z)};
}

MultiedgeWeights eh_init(const KDag& dag) {
  const std::vector<double> ones(dag.num_multiedges(), 1.0);
  return weight_push(dag, ones).weights;
}

MultiedgeWeights eh_update(const MultiedgeWeights& weights, std::span<const double> edge_losses,
                           double eta) {
  const KDag& dag = weights.dag();
  if (edge_losses.size() != dag.num_edges())
    throw InvalidArgument("eh_update: edge loss vector has wrong dimension");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("eh_update: eta must be >= 0");
  std::vector<double> log_w_hat(dag.num_multiedges());
  for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m) {
    double loss = 0.0;
    for (int j = 0; j < dag.k(); ++j) loss += edge_losses[dag.first_edge(m) + j];
    if (!std::isfinite(loss)) throw InvalidArgument("eh_update: non-finite loss");
    log_w_hat[m] = weights.log_weight(m) - eta * loss;
  }
  return weight_push_log(dag, log_w_hat).weights;
}

Multipath eh_sample(const MultiedgeWeights& weights, Rng& rng) {
  const KDag& dag = weights.dag();
  Multipath pi{std::vector<std::uint32_t>(dag.num_edges(), 0)};
  std::vector<std::uint32_t> draws(dag.num_vertices(), 0);
  draws[dag.source()] = 1;
  for (VertexId v : dag.topo_order()) {
    if (dag.is_sink(v)) continue;
    const auto ms = dag.out_multiedges(v);
    for (std::uint32_t d = 0; d < draws[v]; ++d) {
      const double u = uniform01(rng);
      double cum = 0.0;
      MultiedgeId pick = ms.back();
      // Skip trailing zero-weight multiedges when rounding leaves u above cum.
      for (std::size_t i = ms.size(); i-- > 0;)
        if (weights.weight(ms[i]) > 0.0) {
          pick = ms[i];
          break;
        }
      for (MultiedgeId m : ms) {
        cum += weights.weight(m);
        if (u < cum) {
          pick = m;
          break;
        }
      }
      for (int j = 0; j < dag.k(); ++j) {
        const EdgeId e = dag.first_edge(pick) + static_cast<EdgeId>(j);
        ++pi.counts[e];
        ++draws[dag.edge_to(e)];
      }
    }
  }
  return pi;
}

double eh_log_multipath_probability(const MultiedgeWeights& weights, const Multipath& pi) {
  const KDag& dag = weights.dag();
  double lp = std::log(derivation_multiplicity(dag, pi));
  for (MultiedgeId m = 0; m < dag.num_multiedges(); ++m) {
    const std::uint32_t c = pi.multiedge_count(dag, m);
    if (c) lp += c * weights.log_weight(m);
  }
  return lp;
}

double eh_multipath_probability(const MultiedgeWeights& weights, const Multipath& pi) {
  return std::exp(eh_log_multipath_probability(weights, pi));
}

std::vector<double> eh_expected_counts(const MultiedgeWeights& weights) {
  const KDag& dag = weights.dag();
  std::vector<double> counts(dag.num_edges(), 0.0);
  std::vector<double> draws(dag.num_vertices(), 0.0);
  draws[dag.source()] = 1.0;
  for (VertexId v : dag.topo_order()) {
    if (dag.is_sink(v) || draws[v] == 0.0) continue;
    for (MultiedgeId m : dag.out_multiedges(v)) {
      const double c = draws[v] * weights.weight(m);
      for (int j = 0; j < dag.k(); ++j) {
        const EdgeId e = dag.first_edge(m) + static_cast<EdgeId>(j);
        counts[e] += c;
        draws[dag.edge_to(e)] += c;
      }
    }
  }
  return counts;
}

}  // namespace odp
