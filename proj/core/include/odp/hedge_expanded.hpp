#pragma once

#include <span>
#include <vector>

#include "odp/dp_core.hpp"
#include "odp/kdag.hpp"
#include "odp/random.hpp"

namespace odp {

/// Expanded Hedge state: one locally normalized weight per multiedge. The
/// distribution over multipaths is the law of the top-down sampler
/// (eh_sample), which for bit-vector multipaths is exactly the product
/// prod_m w_m^{pi_m}.
///
/// Weights are kept both linearly and as logarithms; the log copy stays
/// meaningful after the linear value underflows on long horizons.
///
/// Holds a pointer to the dag, which must outlive the weights.
class MultiedgeWeights {
 public:
  MultiedgeWeights(const KDag& dag, std::vector<double> log_weights);

  const KDag& dag() const noexcept { return *dag_; }
  double weight(MultiedgeId m) const { return weights_[m]; }
  double log_weight(MultiedgeId m) const { return log_weights_[m]; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> log_weights() const noexcept { return log_weights_; }

  /// max over non-sink v of |sum_{m in M_v} w_m - 1|.
  double normalization_residual() const;

 private:
  const KDag* dag_;
  std::vector<double> log_weights_;
  std::vector<double> weights_;
};

struct PushResult {
  MultiedgeWeights weights;
  std::vector<double> z;      // Z_v per vertex (1 at sinks); may underflow
  std::vector<double> log_z;  // log Z_v
};

/// Generalized weight pushing on linear unnormalized weights w_hat >= 0:
///   Z_v = 1 at sinks, Z_v = sum_{m in M_v} w_hat_m prod_{u in m} Z_u,
///   w_m = w_hat_m prod_{u in m} Z_u / Z_v.
/// Throws InvalidArgument naming a vertex whose group has no positive mass.
PushResult weight_push(const KDag& dag, std::span<const double> w_hat);

/// Same recursion carried out on log w_hat with log-sum-exp.
PushResult weight_push_log(const KDag& dag, std::span<const double> log_w_hat);

/// Uniform distribution over derivations: all w_hat = 1, then pushed.
MultiedgeWeights eh_init(const KDag& dag);

/// w_hat_m = w_m exp(-eta * sum_{e in m} l_e), then pushed (in log space).
MultiedgeWeights eh_update(const MultiedgeWeights& weights, std::span<const double> edge_losses,
                           double eta);

/// Top-down sampler: the source draws one multiedge, every other non-sink
/// vertex draws as many multiedges (independently, with probabilities w) as
/// its inflow.
Multipath eh_sample(const MultiedgeWeights& weights, Rng& rng);

/// Probability that eh_sample returns pi:
///   derivation_multiplicity(pi) * prod_m w_m^{pi_m}.
double eh_multipath_probability(const MultiedgeWeights& weights, const Multipath& pi);
double eh_log_multipath_probability(const MultiedgeWeights& weights, const Multipath& pi);

/// E[pi_e] under the sampler, by a forward pass over topo order.
std::vector<double> eh_expected_counts(const MultiedgeWeights& weights);

}  // namespace odp
