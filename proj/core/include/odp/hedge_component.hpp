#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odp/kdag.hpp"
#include "odp/random.hpp"

namespace odp {

/// Settings for the iterative relative-entropy projection and for the
/// approximate-projection guard used when sampling.
struct ProjectionConfig {
  double tol = 1e-10;              // stop once every residual family is below this
  std::size_t max_cycles = 10'000; // cap on full sweeps
  /// Additive slack for predictions from an approximate projection. Unset
  /// means "use the projection's own residual times |E|".
  std::optional<double> epsilon;
  double floor = 1e-300;           // weights are clamped to this before log steps
  /// Projections ending with a residual above this are flagged approximate.
  double exact_threshold = 1e-8;

  void validate() const;
};

/// Point of (or near) the k-flow polytope, one weight per edge.
struct MeanVector {
  std::vector<double> w;
  double residual = 0.0;
  bool approximate = false;
};

struct Residuals {
  double source = 0.0;     // |w_out(s) - k|
  double multiedge = 0.0;  // max over m of (max_e w_e - min_e w_e) / mean_e w_e
  double vertex = 0.0;     // max over internal v of |w_out(v) - k w_in(v)|
  double max() const;
};

/// Constraint residuals of an arbitrary edge-weight vector.
Residuals kflow_residuals(const KDag& dag, std::span<const double> w);

/// Unnormalized relative entropy sum_i a_i log(a_i / b_i) + b_i - a_i,
/// with 0 log 0 = 0.
double relative_entropy(std::span<const double> a, std::span<const double> b);
double relative_entropy(const Multipath& pi, std::span<const double> b);

/// One of the three constraint families of the k-flow polytope.
struct Constraint {
  enum class Kind { Source, Multiedge, Vertex };
  Kind kind;
  std::uint32_t id = 0;  // multiedge id or vertex id; ignored for Source

  static Constraint source() { return {Kind::Source, 0}; }
  static Constraint multiedge(MultiedgeId m) { return {Kind::Multiedge, m}; }
  static Constraint vertex(VertexId v) { return {Kind::Vertex, v}; }
};

/// Exact relative-entropy projection onto a single constraint, in place:
///  - source:    scale the source's out-edges so they sum to k;
///  - multiedge: set its k weights to their geometric mean;
///  - vertex:    scale out-edges by (k in/out)^(1/(k+1)) and in-edges by
///               (out/(k in))^(k/(k+1)).
/// Weights below `floor` are raised to it first. Returns false (and leaves
/// `w` unchanged) when a vertex step meets zero inflow or outflow.
bool apply_projection_step(const KDag& dag, std::vector<double>& w, Constraint c,
                           double floor = 1e-300);

struct StepResult {
  std::vector<double> w;
  bool skipped = false;  // dead vertex: zero inflow or outflow
};
StepResult project_constraint(const KDag& dag, std::span<const double> w_hat, Constraint c,
                              double floor = 1e-300);

struct ProjectionResult {
  MeanVector mean;
  std::size_t cycles = 0;
  bool converged = false;
  std::size_t skipped_steps = 0;
};

/// Called after every full sweep with the sweep index and current weights.
using SweepObserver = std::function<void(std::size_t, std::span<const double>)>;

/// Cyclic Bregman projection onto the k-flow polytope. One sweep applies the
/// source step, every multiedge step in id order, then every internal vertex
/// step in topo order. Stops after the first sweep whose residual is below
/// cfg.tol; if max_cycles runs out the result is returned flagged approximate.
ProjectionResult project_kflow(const KDag& dag, std::span<const double> w_hat,
                               const ProjectionConfig& cfg = {},
                               const SweepObserver& observer = {});

/// w_hat_e = w_e exp(-eta l_e).
std::vector<double> ch_loss_update(std::span<const double> w, std::span<const double> edge_losses,
                                   double eta);

/// Projection of the constant vector 1/|V|^2. Throws ConvergenceError if the
/// projection does not converge.
MeanVector ch_init(const KDag& dag, const ProjectionConfig& cfg = {});

/// ch_init backed by a file cache in `cache_dir`, keyed by the dag's content
/// hash. The file holds {dag_hash, weights, residual, tool_version}.
MeanVector ch_init_cached(const KDag& dag, const ProjectionConfig& cfg,
                          const std::string& cache_dir);

struct DecompositionPart {
  double coefficient = 0.0;
  Multipath path;
};

struct Decomposition {
  std::vector<DecompositionPart> parts;
  double z = 0.0;  // sum of coefficients

  /// sum_i (c_i / z) pi_i.
  std::vector<double> mean(std::size_t num_edges) const;
  /// sum_i c_i pi_i (unnormalized).
  std::vector<double> reconstruct(std::size_t num_edges) const;
};

struct DecomposeOptions {
  double zero_tol = 1e-13;  // residual weights at or below this count as zero
  /// Allow the greedy walk to get stuck and stop early (approximate inputs).
  bool partial = false;
  /// In strict mode getting stuck is only tolerated once the remaining source
  /// outflow is at most this (rounding leftovers).
  double stuck_tol = 1e-7;
};

/// Greedy decomposition into multipaths: repeatedly walk from the source,
/// taking at each reached vertex the positive multiedge with the largest
/// minimum edge weight (ties: smallest id) as many times as the vertex is
/// reached, then subtract the path scaled by min_e w_e / pi_e. Every round
/// kills at least one multiedge, so there are at most |M| parts.
Decomposition decompose(const KDag& dag, std::span<const double> w,
                        const DecomposeOptions& opts = {});

/// Sufficient slack for at most one unit of extra loss over `horizon`
/// trials: min(tol |E|, 1 / (T (1 + |E| + (2|V|/k)(D + 2|E|)))).
double default_epsilon(const KDag& dag, double tol, std::size_t horizon, double d_bound);

/// The mixture CH predicts from. Exact mean vectors are decomposed directly;
/// approximate ones are first lifted to w + epsilon * 1 and decomposed
/// partially. The result is normalized (z is reported before normalization).
Decomposition ch_prediction(const KDag& dag, const MeanVector& w, const ProjectionConfig& cfg);

/// Draws part i with probability c_i / z.
const Multipath& sample_decomposition(const Decomposition& dec, Rng& rng);

Multipath ch_sample(const KDag& dag, const MeanVector& w, const ProjectionConfig& cfg, Rng& rng);

}  // namespace odp
