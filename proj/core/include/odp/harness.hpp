#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odp/adversary.hpp"
#include "odp/hedge_component.hpp"
#include "odp/kdag.hpp"
#include "odp/problems.hpp"

namespace odp {

enum class Algorithm { Eh, Ch, Fpl, HedgeOracle };

Algorithm parse_algorithm(const std::string& name);
const char* algorithm_name(Algorithm a);

/// Explicit Hedge over enumerated objects is only run up to this many.
inline constexpr std::size_t kHedgeOracleCap = 10'000;

struct ExperimentConfig {
  ProblemInstance problem;
  std::string problem_json;  // echoed in the summary; may be empty
  Algorithm algorithm = Algorithm::Eh;
  std::size_t horizon = 100;
  std::optional<double> eta;  // unset: tune_eta
  std::uint64_t seed = 0;
  AdversaryConfig adversary;
  ProjectionConfig projection;  // CH only
  std::optional<double> fpl_scale;  // unset: fpl_default_scale
  bool fpl_matrix_chain = false;    // extension: allow FPL on matrix chain
  std::string cache_dir;            // ch_init cache; empty disables it

  void validate() const;
};

/// Parses the `run` config: the problem fields of problem_from_json plus
/// "algorithm", "T", "eta" (number or "auto"), "seed", "adversary" (name or
/// {"kind", "file", "shift_weight", "phases"}), "projection" ({"tol",
/// "max_cycles", "epsilon"}), "fpl_scale", "fpl_matrix_chain", "cache_dir".
ExperimentConfig experiment_from_json(std::string_view text);

struct TrialRecord {
  std::size_t t = 0;
  /// Loss charged to the learner: the expected loss of its prediction
  /// distribution for eh, ch and hedge_oracle, the realized loss for fpl.
  double loss = 0.0;
  double realized_loss = 0.0;  // loss of the sampled multipath
  double eta = 0.0;
  double residual = 0.0;       // ch: residual of the mean vector predicted from
  std::uint64_t sample_hash = 0;
  double ms = 0.0;
};

struct Trace {
  std::vector<TrialRecord> records;
  double eta = 0.0;  // fpl: perturbation scale
  double cum_loss = 0.0;
  double realized_cum_loss = 0.0;
  double l_star = 0.0;
  Multipath best;
  double regret = 0.0;
  /// Regret envelope; NaN when none applies (fpl, or a hand-set eta).
  double bound = 0.0;
  bool within_bound = true;
  std::size_t approximate_trials = 0;  // ch: predictions through the epsilon guard
  std::vector<double> summed_edge_losses;
};

/// EH and hedge_oracle: (1/B) sqrt(2 ln N / T).
/// CH: sqrt(2 Delta0 / (T B)) with Delta0 = 2 D log|V| + D log D.
/// Throws for fpl, which has a perturbation scale instead, and when N <= 1.
double tune_eta(Algorithm a, std::size_t horizon, const KDag& dag, double loss_bound,
                double norm_bound);

/// EH and hedge_oracle: B sqrt(2 T ln N) + B ln N. CH, in units of the
/// largest edge loss B/D: D sqrt(4 T log|V|) + 2 D log|V| for bit-vector
/// multipaths, else D sqrt(2 T (2 log|V| + log D)) + 2 D log|V| + D log D.
/// NaN for fpl.
double regret_bound(Algorithm a, std::size_t horizon, const ProblemInstance& problem);

Trace run_experiment(const ExperimentConfig& cfg);

/// Runs independent cells on up to `threads` threads (0: hardware
/// concurrency). Results are in input order.
std::vector<Trace> run_cells(const std::vector<ExperimentConfig>& cells, unsigned threads = 0);

/// sum_t loss_t - L*.
double compute_regret(const Trace& trace);

/// Columns t, loss, cum_loss, eta, residual, sample_hash, ms.
void write_trace_csv(std::ostream& os, const Trace& trace);

/// {config, L_star, cum_loss, regret, bound, within_bound, ...}.
std::string trace_summary_json(const ExperimentConfig& cfg, const Trace& trace);

}  // namespace odp
